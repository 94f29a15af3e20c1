/* Copyright 2026 The siegert authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/** @file core.hpp
 *  @brief Shared physical conventions: units, complex wave numbers and
 *    energies, state classification, and the dispersion maps for the
 *    continuum and for the tight-binding chain.
 */

#ifndef SIEGERT_CORE_HPP
#define SIEGERT_CORE_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegert {

using complex = std::complex<double>;

/** Base class of all numerical-failure exceptions thrown by this library. */
struct Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Natural unit scales. Defaults are hbar = m = 1 for continuum problems and
 *  t_h = dx = 1 for lattice problems, so that wave numbers come out in units
 *  of 1/l (or 1/dx) and energies in hbar^2/(m l^2) (or t_h). */
struct Units {
    double hbar = 1.0;
    double mass = 1.0;
    double lattice_dx = 1.0;
    double hopping_th = 1.0;

    void validate() const;
};

/** Complex wave number K = k - i kappa. Resonant states have k > 0 and
 *  kappa > 0 (they diverge in space); bound states have kappa < 0. */
struct ComplexWaveNumber {
    double k = 0.0;
    double kappa = 0.0;

    complex value() const { return complex(k, -kappa); }
    static ComplexWaveNumber from_value(complex K) {
        return ComplexWaveNumber{K.real(), -K.imag()};
    }
};

/** Complex energy E = epsilon - i Gamma/2. Decaying states have Gamma > 0. */
struct ComplexEnergy {
    double epsilon = 0.0;
    double half_gamma = 0.0;

    double gamma() const { return 2.0 * half_gamma; }
    complex value() const { return complex(epsilon, -half_gamma); }
    static ComplexEnergy from_value(complex E) {
        return ComplexEnergy{E.real(), -E.imag()};
    }
};

enum class Parity { even, odd, none };

enum class StateKind { bound, anti_bound, resonant, anti_resonant };

/** Which root of the outgoing-wave condition a boundary term continues from.
 *  retarded_decaying is the physical choice for decaying (resonant) states;
 *  advanced_growing is its time reverse, used for anti-resonant states. */
enum class LeadKind { retarded_decaying, advanced_growing };

/** A solved pole of an open quantum system: the wave number, the energy,
 *  the parity sector it was found in (if any), its classification, and the
 *  magnitude of the defining equation at the returned root. */
struct ResonantState {
    ComplexWaveNumber K;
    ComplexEnergy E;
    Parity parity = Parity::none;
    StateKind kind = StateKind::resonant;
    double residual = 0.0;
};

/** Complex amplitudes on the integer sites x in [-half_width, half_width],
 *  optionally extended by a side-coupled (adatom) amplitude, at a time. */
struct WaveField {
    double time = 0.0;
    int half_width = 0;
    std::vector<complex> sites;
    std::optional<complex> adatom;

    complex amplitude(int x) const { return sites.at(static_cast<size_t>(x + half_width)); }
    complex& amplitude(int x) { return sites.at(static_cast<size_t>(x + half_width)); }
    void validate() const;
};

/** E = hbar^2 K^2 / 2m, computed componentwise so that
 *  Gamma = (2 hbar^2 / m) k kappa holds to the last bit. */
ComplexEnergy continuum_dispersion(ComplexWaveNumber K, const Units& u);

/** E = -t_h cos(K dx) for the tight-binding chain with hopping -t_h/2. */
ComplexEnergy lattice_dispersion(ComplexWaveNumber K, const Units& u);

/** The Bloch-like factor z = e^{iK dx} belonging to the lead continuation of
 *  energy E, i.e. the root of z^2 + (2E/t_h) z + 1 = 0 selected by `kind`.
 *
 *  Selection rule (a naive principal-branch square root picks the wrong root
 *  in two quadrants, so the roots are computed first and then selected):
 *   - complex E: the two roots have imaginary parts of opposite signs;
 *     retarded_decaying takes Im z > 0, advanced_growing takes Im z < 0.
 *   - real E inside the band (|E| < t_h): |z| = 1; retarded takes the upper
 *     semicircle (outgoing travelling wave), advanced its conjugate.
 *   - real E outside the band (|E| >= t_h): both roots are real; both kinds
 *     take |z| <= 1 (the tail decaying away from the boundary).
 *  The two kinds are related by z_adv(E) = conj(z_ret(conj(E))). */
complex lead_phase_factor(complex E, double t_h, LeadKind kind);

/** Inverse of lattice_dispersion on the branch fixed by lead_phase_factor:
 *  K = -i Log z / dx, so Re K in [0, pi/dx] for the retarded kind and
 *  [-pi/dx, 0] for the advanced kind. */
ComplexWaveNumber lattice_wavenumber(ComplexEnergy E, const Units& u,
                                     LeadKind kind = LeadKind::retarded_decaying);

/** Classify a pole by the signs of k, kappa and Gamma. |Gamma| <= gamma_tol
 *  (in the local energy unit) marks a real-energy pole: bound if Im K > 0,
 *  anti-bound otherwise. */
StateKind classify_state(ComplexWaveNumber K, ComplexEnergy E, double gamma_tol = 1e-10);

}  // namespace siegert

#endif
