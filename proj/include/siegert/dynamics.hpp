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

/** @file dynamics.hpp
 *  @brief Runge-Kutta time evolution on the truncated chain with fixed
 *    effective-potential boundary terms. Bound states stay stationary,
 *    resonances decay at Gamma/hbar, anti-resonances grow; the boundary
 *    potential is exact for the matched eigenstate and approximate otherwise.
 */

#ifndef SIEGERT_DYNAMICS_HPP
#define SIEGERT_DYNAMICS_HPP

#include <optional>
#include <vector>

#include "siegert/core.hpp"
#include "siegert/friedrichs.hpp"
#include "siegert/lattice.hpp"

namespace siegert::dynamics {

struct UnstableStep : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};

struct EvolutionConfig {
    double dt = 0.05;  // in hbar/t_h
    double t_end = 60.0;
    int record_every = 1;
    std::optional<complex> v_eff_override;  // else fixed from the boundary state
    Units units;

    static constexpr double dt_max = 0.1;
    static constexpr double amplitude_guard = 1e100;

    void validate() const;
};

/** Classical RK4 evolution of `init` under the open-chain Hamiltonian with
 *  both boundary sites pinned to V_eff evaluated at the boundary state's
 *  eigenvalue (advanced branch for growing kinds). Snapshots at every
 *  `record_every`-th step, first and last always included. */
std::vector<WaveField> evolve(const lattice::LatticeModel& model, const WaveField& init,
                              const ResonantState& state_for_boundary,
                              const EvolutionConfig& cfg);

/** Same evolution for the chain-plus-adatom model; the field must carry an
 *  adatom amplitude. The chain extent is taken from the initial field. */
std::vector<WaveField> evolve(const friedrichs::FriedrichsModel& model, const WaveField& init,
                              const friedrichs::FriedrichsState& state_for_boundary,
                              const EvolutionConfig& cfg);

/** Max over recorded sites and times of |Psi(x,t) - Psi(x,0) e^{-iEt/hbar}|.
 *  For eigenstate initial data this is pure integrator error, O(dt^4 t). */
double eigenstate_phase_check(const std::vector<WaveField>& snapshots, const ComplexEnergy& E,
                              const Units& units = {});

struct WindowNormSeries {
    std::vector<double> t;
    std::vector<double> N;     // sum over |x| <= L_window of |Psi|^2, + |adatom|^2
    std::vector<double> flux;  // outward hopping flux through the window edge
};

/** Particle number inside |x| <= L_window along the run, with the companion
 *  discrete flux through the bonds (L_window, L_window+1); requires
 *  L_window < L so those bonds exist. */
WindowNormSeries window_norm_series(const std::vector<WaveField>& snapshots, int L_window,
                                    double t_h, const Units& units = {});

}  // namespace siegert::dynamics

#endif
