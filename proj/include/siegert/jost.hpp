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

/** @file jost.hpp
 *  @brief Radial partial waves in three dimensions: Jost solutions by inward
 *    integration, Jost functions from the r -> 0 intercept, the partial-wave
 *    S matrix S_l = (-1)^l f_-/f_+, cross sections, and resonance poles as
 *    complex-k zeros of f_+.
 */

#ifndef SIEGERT_JOST_HPP
#define SIEGERT_JOST_HPP

#include <functional>
#include <vector>

#include "siegert/core.hpp"

namespace siegert::jost {

struct Overflow : Error {
    using Error::Error;
};
struct BadPotential : Error {
    using Error::Error;
};
struct ExtrapolationUnstable : Error {
    using Error::Error;
};
struct AtPole : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};

/** A radius around which the potential varies on a scale much shorter than
 *  the global step; the integrator refines its step there. */
struct SharpFeature {
    double center = 0.0;
    double width = 0.0;
};

struct RadialProblem {
    int l = 0;
    std::function<double(double)> V;  // real radial potential
    double r_max = 0.0;
    double r_min = 0.0;
    Units u;

    double step_hint = 0.0;         // 0: choose from an accuracy budget
    double grading_fraction = 0.02; // step <= fraction * r near the origin
    std::vector<SharpFeature> sharp_features;
    double range_scale = 0.0;       // 0: infer r_max / 40

    double inferred_range() const { return range_scale > 0.0 ? range_scale : r_max / 40.0; }
    void validate() const;
};

struct JostPair {
    complex f_plus;
    complex f_minus;
    complex k;
};

struct RadialSamples {
    std::vector<double> r;          // ascending, r_min .. r_max
    std::vector<complex> chi;
    std::vector<complex> chi_prime;
    complex k;
    int sign = +1;
    int l = 0;
};

/** chi_l''(r) = [2mV/hbar^2 + l(l+1)/r^2 - k^2] chi_l(r) integrated inward
 *  from r_max, started on the exact free outgoing (sign=+1) or incoming
 *  (sign=-1) solution there. The free solutions are e^{+-ikr} times a
 *  terminating polynomial in 1/(kr); for l = 0 they are plain exponentials. */
RadialSamples jost_solution(const RadialProblem& prob, complex k, int sign);

/** Jost function f_{+-}(k) = (2l+1) lim_{r->0} r^l f_{+-}(r;k), extrapolated
 *  from the innermost samples via the two-term small-r form
 *  r^l chi = c + b r^{2l+1}. */
complex jost_function(const RadialProblem& prob, complex k, int sign);

/** Both Jost functions at one k. */
JostPair jost_pair(const RadialProblem& prob, complex k);

/** S_l(k) = (-1)^l f_-(k) / f_+(k). */
complex partial_wave_smatrix(const RadialProblem& prob, complex k);

struct CrossSection {
    std::vector<double> theta;          // [0, pi]
    std::vector<double> dsigma_domega;
    double sigma_total = 0.0;
    double truncation_ratio = 0.0;  // last partial wave's share of sigma_total
    std::vector<complex> s_values;  // S_0 .. S_lmax
};

/** Partial-wave sums from S-matrix values: dsigma/dOmega(theta) =
 *  |sum (2l+1)(1 - S_l) P_l(cos theta)|^2 / (4k^2) and
 *  sigma_total = (pi/k^2) sum (2l+1)|1 - S_l|^2. */
CrossSection cross_section_from_smatrix(const std::vector<complex>& s_values, double k,
                                        int n_theta = 181);

/** Cross sections for the potential of `base` summed over l = 0..l_max
 *  (the l stored in `base` is ignored). */
CrossSection cross_section(const RadialProblem& base, int l_max, double k, int n_theta = 181);

struct KRegion {
    double re_min = 0.0, re_max = 0.0;
    int n_re = 25;
    double im_min = 0.0, im_max = 0.0;
    int n_im = 25;
};

struct PoleSearchDiagnostics {
    int seeds = 0;
    int failed = 0;
};

/** Zeros of f_+(k) inside the region: coarse |f_+| scan for seeds, then
 *  damped Newton on a numerical derivative. Each zero is mapped to
 *  E = hbar^2 k^2 / 2m and classified; the stored residual is |f_+| at the
 *  accepted zero. Seeds that fail to converge are only counted. */
std::vector<ResonantState> pole_search(const RadialProblem& prob, const KRegion& region,
                                       PoleSearchDiagnostics* diag = nullptr);

}  // namespace siegert::jost

#endif
