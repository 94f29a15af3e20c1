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

#include "siegert/core.hpp"

#include <cmath>

namespace siegert {

void Units::validate() const {
    if (!(hbar > 0.0) || !(mass > 0.0) || !(lattice_dx > 0.0) || !(hopping_th > 0.0)) {
        throw std::invalid_argument("Units: all scales must be strictly positive");
    }
}

void WaveField::validate() const {
    if (half_width < 0 || sites.size() != static_cast<size_t>(2 * half_width + 1)) {
        throw std::invalid_argument("WaveField: site count must be 2*half_width + 1");
    }
}

ComplexEnergy continuum_dispersion(ComplexWaveNumber K, const Units& u) {
    const double c = u.hbar * u.hbar / (2.0 * u.mass);
    ComplexEnergy E;
    E.epsilon = c * (K.k * K.k - K.kappa * K.kappa);
    E.half_gamma = 2.0 * c * K.k * K.kappa;
    return E;
}

ComplexEnergy lattice_dispersion(ComplexWaveNumber K, const Units& u) {
    return ComplexEnergy::from_value(-u.hopping_th * std::cos(K.value() * u.lattice_dx));
}

complex lead_phase_factor(complex E, double t_h, LeadKind kind) {
    // Roots of z^2 + (2E/t_h) z + 1 = 0 via the numerically stable form:
    // with w = -E/t_h, z = w +- sqrt(w^2 - 1). The sign of the square root is
    // flipped so that |w + s| >= 1, and the second root is its exact
    // reciprocal, which avoids cancellation for |E| >> t_h.
    const complex w = -E / t_h;
    complex s = std::sqrt(w * w - 1.0);
    if (std::real(std::conj(w) * s) < 0.0) s = -s;
    const complex big = w + s;
    const complex small = 1.0 / big;

    if (E.imag() == 0.0 && std::abs(E.real()) >= t_h) {
        // Outside the band both roots are real; the pole continuation for
        // either kind is the tail that decays away from the boundary.
        return (std::abs(big) <= 1.0) ? big : small;
    }
    const bool big_is_upper = big.imag() >= small.imag();
    const complex upper = big_is_upper ? big : small;
    const complex lower = big_is_upper ? small : big;
    return (kind == LeadKind::retarded_decaying) ? upper : lower;
}

ComplexWaveNumber lattice_wavenumber(ComplexEnergy E, const Units& u, LeadKind kind) {
    const complex z = lead_phase_factor(E.value(), u.hopping_th, kind);
    ComplexWaveNumber K;
    K.k = std::arg(z) / u.lattice_dx;
    K.kappa = std::log(std::abs(z)) / u.lattice_dx;
    return K;
}

StateKind classify_state(ComplexWaveNumber K, ComplexEnergy E, double gamma_tol) {
    if (std::abs(E.gamma()) <= gamma_tol) {
        return (K.kappa < 0.0) ? StateKind::bound : StateKind::anti_bound;
    }
    return (E.gamma() > 0.0) ? StateKind::resonant : StateKind::anti_resonant;
}

}  // namespace siegert
