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

/** @file friedrichs.hpp
 *  @brief Chain-plus-adatom model: an infinite tight-binding chain whose site
 *    x = 0 couples with strength g to a single impurity level E_d. The even
 *    sector reduces to a quartic in z = e^{iK dx}; its four roots are the
 *    bound, resonant, and anti-resonant states of the model.
 */

#ifndef SIEGERT_FRIEDRICHS_HPP
#define SIEGERT_FRIEDRICHS_HPP

#include <array>
#include <vector>

#include "siegert/core.hpp"

namespace siegert::friedrichs {

struct FriedrichsModel {
    double g_tilde = 0.1;    // g / t_h
    double Ed_tilde = -0.5;  // E_d / t_h
    double t_h = 1.0;

    void validate() const;
};

struct FriedrichsState {
    complex z;  // e^{iK dx}
    ComplexWaveNumber K;
    ComplexEnergy E;
    StateKind kind = StateKind::resonant;
    complex B_over_F;  // chain amplitude over adatom amplitude, (E - E_d)/g
};

/** The four roots of z^4 + 2 Ed~ z^3 + 4 g~^2 z^2 - 2 Ed~ z - 1 = 0, mapped
 *  to (K, E) by E = -t_h (z + 1/z)/2 and classified. Order: bound-like roots
 *  first (by descending Re E), then the decaying and the growing member of
 *  the resonance pair. */
std::array<FriedrichsState, 4> quartic_roots(const FriedrichsModel& model);

/** Residual of the energy-plane form of the dispersion relation,
 *  min over signs of |(E - E_d) sqrt(E^2 - t_h^2) -+ g^2|. */
double energy_plane_check(const FriedrichsState& state, const FriedrichsModel& model);

/** Even-sector eigenfunction on sites |x| <= x_half_range: psi(x) = B z^{|x|}
 *  with the adatom amplitude fixed to F = 1 and B = (E - E_d)/g. */
WaveField eigenfunction(const FriedrichsState& state, const FriedrichsModel& model,
                        int x_half_range);

struct SweepPoint {
    double Ed_tilde = 0.0;
    std::array<FriedrichsState, 4> roots;  // matched to the previous point
};

/** Quartic roots along a grid of impurity levels, with root identities
 *  carried from point to point by minimum-total-distance assignment in the
 *  z-plane, so each of the four columns is a continuous branch. */
std::vector<SweepPoint> tracked_sweep(double g_tilde, const std::vector<double>& ed_grid,
                                      double t_h = 1.0);

}  // namespace siegert::friedrichs

#endif
