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

/** @file delta_well.hpp
 *  @brief Exact treatment of the symmetric double-delta barrier
 *    V(x) = V0 [delta(x+l) + delta(x-l)]: Siegert roots of the parity-reduced
 *    outgoing-wave condition, the graphical root curves, the S matrix, and
 *    transmission scans.
 *
 *  Everything is phrased in the dimensionless variables zeta = K l and
 *  alpha = a/l, where a = hbar^2/(2 m V0) is the length scale of the barrier
 *  strength. The outgoing-wave condition of parity p reads
 *      F(zeta) = 1 - 2 i alpha zeta + s_p e^{2 i zeta} = 0,
 *  with s_p = +1 for even and -1 for odd solutions.
 */

#ifndef SIEGERT_DELTA_WELL_HPP
#define SIEGERT_DELTA_WELL_HPP

#include <utility>
#include <vector>

#include "siegert/core.hpp"

namespace siegert::delta_well {

struct DoubleDeltaModel {
    double a_over_l = 1.0;
    double l = 1.0;

    void validate() const;
};

/** One abscissa xi = k l of the two families of root curves: the fixed-point
 *  curve eta = l/(2a) + xi/tan(2 xi) (one value, possibly infinite at the
 *  poles of the cotangent) and the modulus curve
 *  e^{4 eta} = (1 - 2a eta/l)^2 + (2a xi/l)^2 (zero to three eta >= 0 roots;
 *  three occur once the curve has split into a closed loop near the origin
 *  plus an unbounded branch). */
struct ParityCurveSample {
    double xi = 0.0;
    double eta_fixed_point = 0.0;
    std::vector<double> eta_circle;
};

struct SMatrix {
    complex r;
    complex t;
};

/** Search diagnostics. Newton failures are per-seed events and do not abort
 *  the search; they are counted here. closed_branch notes that the modulus
 *  curve has split (the regime in which the lowest even root is missing). */
struct RootSearchDiagnostics {
    int failed_seeds = 0;
    bool closed_branch = false;
};

struct NoConvergence : Error {
    using Error::Error;
};
struct EmptyWindow : Error {
    using Error::Error;
};
struct AtPole : Error {
    using Error::Error;
};

/** Left-hand side of the parity-reduced outgoing-wave condition at zeta = Kl. */
complex root_equation(const DoubleDeltaModel& model, Parity parity, complex zeta);

/** True once the modulus curve consists of a closed loop plus an unbounded
 *  branch, which happens for a/l above the critical coupling solving
 *  ln(a/l) = 1 + l/a. */
bool modulus_curve_is_split(const DoubleDeltaModel& model);

/** All Siegert roots of the requested parity with k l inside
 *  (xi_min, xi_max), found by damped Newton iteration from a fan of seeds
 *  near zeta = n pi (odd) and (n + 1/2) pi (even), deduplicated and sorted by
 *  Re K. Each root satisfies |F| < tol and Im K < 0. With include_mirrors
 *  the anti-resonant partners (-k, same kappa) are appended. */
std::vector<ResonantState> siegert_roots(const DoubleDeltaModel& model, Parity parity,
                                         double xi_min, double xi_max, double tol = 1e-13,
                                         bool include_mirrors = false,
                                         RootSearchDiagnostics* diag = nullptr);

/** Both root-curve families sampled on xi_grid, for plotting and for locating
 *  roots graphically as curve crossings. */
std::vector<ParityCurveSample> parity_curves(const DoubleDeltaModel& model,
                                             const std::vector<double>& xi_grid);

/** Reflection and transmission amplitudes at complex K. Throws AtPole when
 *  the common denominator (2iKa - 1)^2 - e^{4iKl} is below 1e-13 in modulus,
 *  i.e. when K is a Siegert root. */
SMatrix s_matrix(const DoubleDeltaModel& model, ComplexWaveNumber K);

/** Transmission probability T = |t|^2 on a real k grid. */
std::vector<std::pair<double, double>> transmission_scan(const DoubleDeltaModel& model,
                                                         const std::vector<double>& k_grid);

}  // namespace siegert::delta_well

#endif
