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

/** @file flux.hpp
 *  @brief Numerical checks of the flux and lifetime identities of open 1D
 *    systems: the imaginary part of the energy expectation over a segment
 *    equals minus the outgoing momentum flux through its ends for any wave
 *    function; for a Siegert eigenfunction this becomes
 *    (Gamma/2) <psi|psi>_Omega = (hbar^2 k / 2m) |psi|^2 at the boundary,
 *    and the particle number inside a window expanding at the resonance
 *    velocity hbar k / m stays constant.
 */

#ifndef SIEGERT_FLUX_HPP
#define SIEGERT_FLUX_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "siegert/core.hpp"
#include "siegert/delta_well.hpp"

namespace siegert::flux {

/** Complex amplitudes sampled on a uniform grid. */
struct SampledWaveFunction {
    std::vector<double> grid;
    std::vector<complex> values;
    double dx = 0.0;

    void validate() const;
    static SampledWaveFunction from_function(double x0, double x1, size_t n,
                                             const std::function<complex(double)>& f);
};

struct SegmentReport {
    double L = 0.0;
    complex energy_expectation;  // kinetic part plus the optional potential part
    double boundary_flux = 0.0;  // Re of the outward momentum expectation at the ends
    double imbalance = 0.0;      // |Im<H> + (hbar/2m) flux|, O(dx^2) for smooth psi
};

struct GammaFluxReport {
    double lhs = 0.0;  // (Gamma/2) <psi|psi> over [-L, L]
    double rhs = 0.0;  // (hbar^2 k / 2m) (|psi(L)|^2 + |psi(-L)|^2)
    double relative_gap = 0.0;
};

struct ExpandingVolumeOptions {
    /** Evaluate the window at this constant half width instead of L(t). */
    std::optional<double> fixed_L;
    /** Include the exact interior integrals of the double-delta eigenfunction;
     *  without a model only the pure outgoing tail (|C| = 1) is counted. */
    const delta_well::DoubleDeltaModel* model = nullptr;
    Units units;
};

struct SegmentOutOfGrid : Error {
    using Error::Error;
};
struct NotARoot : Error {
    using Error::Error;
};
struct NotDecaying : Error {
    using Error::Error;
};
struct NonPositiveKappa : Error {
    using Error::Error;
};

/** Trapezoidal quadrature of psi* (-hbar^2/2m psi'' + V psi) over [-L, L],
 *  with second-order finite differences (one-sided at grid endpoints).
 *  V must be real-valued with support inside the segment. */
complex energy_expectation(const SampledWaveFunction& psi,
                           const std::function<double(double)>& V, double L, const Units& u);

/** Evaluates both sides of the segment identity
 *  Im<H>_Omega = -(hbar/2m) Re<p_n>_dOmega and reports their imbalance,
 *  which is O(dx^2) for smooth psi. The potential does not contribute to
 *  Im<H> as long as it is real, so none is needed; pass one to fill the
 *  real part of energy_expectation completely. */
SegmentReport boundary_flux(const SampledWaveFunction& psi, double L, const Units& u,
                            const std::function<double(double)>& V = nullptr);

/** The eigenfunction identity (Gamma/2) <psi|psi>_Omega =
 *  (hbar^2 k / 2m) |psi|^2_dOmega, evaluated with the exact piecewise
 *  cos/sin-plus-outgoing-exponential eigenfunction of the double-delta
 *  barrier and analytic integrals. Throws NotARoot unless state.K solves the
 *  parity equation (the check is skipped for bound-type inputs with
 *  Gamma = 0, where both sides vanish). */
GammaFluxReport gamma_flux_identity(const ResonantState& state,
                                    const delta_well::DoubleDeltaModel& model, double L);

/** Particle number N(t) = e^{-Gamma t / hbar} Int |psi|^2 inside the window
 *  |x| < L(t) = (hbar k / m) t, from analytic integrals. With the default
 *  pure-tail normalization (|C| = 1, window measured from the origin) N is
 *  constant exactly. With a model the interior integral is compensated by
 *  the lower limit of the tail integral (the two are equal at a root; that
 *  equality is the Gamma-flux identity), so N is the same constant scaled
 *  by |C|^2, up to the accuracy of the supplied root. */
std::vector<std::pair<double, double>> expanding_volume_number(
    const ResonantState& state, const std::vector<double>& t_grid,
    const ExpandingVolumeOptions& opt = {});

/** Norm 1/sqrt(2 kappa) assigned to the pure outgoing tail by Gaussian
 *  regularization. */
double regularized_norm(const ResonantState& state);

}  // namespace siegert::flux

#endif
