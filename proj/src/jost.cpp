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

#include "siegert/jost.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace siegert::jost {

void RadialProblem::validate() const {
    u.validate();
    if (l < 0) throw Error("jost: angular momentum must be non-negative");
    if (!V) throw Error("jost: no potential callback");
    if (!(r_min > 0.0) || !(r_max > r_min)) throw Error("jost: need 0 < r_min < r_max");
    if (!std::isfinite(r_max)) throw Error("jost: r_max must be finite");
    if (!(grading_fraction > 0.0) || grading_fraction > 0.5)
        throw Error("jost: grading fraction must lie in (0, 1/2]");
    if (step_hint < 0.0) throw Error("jost: step hint must be non-negative");
    for (const SharpFeature& f : sharp_features)
        if (!(f.width > 0.0)) throw Error("jost: sharp feature width must be positive");
}

namespace {

constexpr double overflow_exponent = 300.0;
constexpr double phase_error_budget = 1e-10;

void check_guards(const RadialProblem& prob, complex k) {
    prob.validate();
    if (std::abs(k.imag()) * prob.r_max >= overflow_exponent)
        throw Overflow("jost: |Im k| r_max too large for double-precision exponentials");
    if (prob.l > 0 && std::abs(k) < 1e-6)
        throw Error("jost: k too close to the l > 0 branch point at the origin");
    const double tail = std::abs(prob.r_max * prob.V(prob.r_max));
    const double bound =
        1e-8 * prob.u.hbar * prob.u.hbar / (2.0 * prob.u.mass * prob.r_max);
    if (tail >= bound)
        throw BadPotential("jost: potential tail at r_max violates the short-range bound");
}

/* Exact free solution tending to e^{+ikr}: e^{ikr} times the terminating
 * hypergeometric sum over s of (l+s)!/(s!(l-s)!) (i/(2kr))^s. */
void free_solution(int l, complex k, double r, complex& f, complex& df) {
    const complex e = std::exp(complex(0.0, 1.0) * k * r);
    complex sum = 0.0, dsum = 0.0;
    double c = 1.0;
    complex w_pow = 1.0;  // (i/(2k))^s
    double r_pow = 1.0;   // r^{-s}
    for (int s = 0; s <= l; ++s) {
        if (s > 0) {
            c *= static_cast<double>(l + s) * static_cast<double>(l - s + 1) /
                 static_cast<double>(s);
            w_pow *= complex(0.0, 1.0) / (2.0 * k);
            r_pow /= r;
        }
        const complex term = c * w_pow * r_pow;
        sum += term;
        dsum += term * static_cast<double>(-s) / r;
    }
    f = e * sum;
    df = e * (complex(0.0, 1.0) * k * sum + dsum);
}

double base_step(const RadialProblem& prob, complex k) {
    if (prob.step_hint > 0.0) return prob.step_hint;
    double h = prob.inferred_range() / 80.0;
    const double kk = std::abs(k);
    if (kk > 0.0) {
        // RK4 phase error over the whole sweep is about r_max |k|^5 h^4 / 120;
        // hold it to the budget.
        const double osc = std::pow(
            120.0 * phase_error_budget / (std::max(prob.r_max, 1.0) * std::pow(kk, 5)), 0.25);
        h = std::min(h, osc);
    }
    h = std::min(h, prob.r_max / 100.0);
    h = std::max(h, (prob.r_max - prob.r_min) * 1e-8);
    return h;
}

double local_step(const RadialProblem& prob, double h0, double r) {
    double h = std::min(h0, prob.grading_fraction * r);
    for (const SharpFeature& f : prob.sharp_features)
        if (std::abs(r - f.center) <= 8.0 * f.width) h = std::min(h, 0.25 * f.width);
    return h;
}

}  // namespace

RadialSamples jost_solution(const RadialProblem& prob, complex k, int sign) {
    if (sign != 1 && sign != -1) throw Error("jost: sign must be +1 or -1");
    check_guards(prob, k);
    const complex ks = (sign > 0) ? k : -k;
    const complex k2 = k * k;
    const double ll1 = static_cast<double>(prob.l) * (prob.l + 1);
    const double vc = 2.0 * prob.u.mass / (prob.u.hbar * prob.u.hbar);
    auto U = [&](double r) { return complex(vc * prob.V(r) + ll1 / (r * r), 0.0) - k2; };

    RadialSamples out;
    out.k = k;
    out.sign = sign;
    out.l = prob.l;

    complex y1, y2;
    free_solution(prob.l, ks, prob.r_max, y1, y2);

    const double h0 = base_step(prob, k);
    double r = prob.r_max;
    out.r.push_back(r);
    out.chi.push_back(y1);
    out.chi_prime.push_back(y2);
    while (r > prob.r_min) {
        double h = local_step(prob, h0, r);
        if (r - h < prob.r_min + 0.25 * h) h = r - prob.r_min;
        const double hs = -h;
        const complex k1a = y2, k1b = U(r) * y1;
        const double rm = r + 0.5 * hs;
        const complex k2a = y2 + 0.5 * hs * k1b, k2b = U(rm) * (y1 + 0.5 * hs * k1a);
        const complex k3a = y2 + 0.5 * hs * k2b, k3b = U(rm) * (y1 + 0.5 * hs * k2a);
        const double re = r + hs;
        const complex k4a = y2 + hs * k3b, k4b = U(re) * (y1 + hs * k3a);
        y1 += hs / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        y2 += hs / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        r = re;
        if (!std::isfinite(std::abs(y1)) || std::abs(y1) > 1e300)
            throw Overflow("jost: solution overflowed during inward integration");
        out.r.push_back(r);
        out.chi.push_back(y1);
        out.chi_prime.push_back(y2);
    }
    std::reverse(out.r.begin(), out.r.end());
    std::reverse(out.chi.begin(), out.chi.end());
    std::reverse(out.chi_prime.begin(), out.chi_prime.end());
    return out;
}

namespace {

/* Least-squares intercept of y = r^l chi against the small-r model
 * y = c + b r^{2l+1}, over three samples starting at `first`. */
complex intercept_fit(const RadialSamples& s, int l, size_t first) {
    Eigen::Matrix<complex, 3, 2> A;
    Eigen::Vector3cd rhs;
    for (size_t i = 0; i < 3; ++i) {
        const double r = s.r[first + i];
        A(static_cast<Eigen::Index>(i), 0) = 1.0;
        A(static_cast<Eigen::Index>(i), 1) = std::pow(r, 2 * l + 1);
        rhs[static_cast<Eigen::Index>(i)] = std::pow(r, l) * s.chi[first + i];
    }
    const Eigen::Vector2cd x = A.colPivHouseholderQr().solve(rhs);
    return x[0];
}

}  // namespace

complex jost_function(const RadialProblem& prob, complex k, int sign) {
    const RadialSamples s = jost_solution(prob, k, sign);
    if (s.r.size() < 4) throw Error("jost: too few radial samples for the intercept");
    const complex c0 = intercept_fit(s, prob.l, 0);
    const complex c1 = intercept_fit(s, prob.l, 1);
    double scale = std::abs(c0);
    for (size_t i = 0; i < 4; ++i)
        scale = std::max(scale, std::abs(std::pow(s.r[i], prob.l) * s.chi[i]));
    if (std::abs(c0 - c1) > 1e-5 * std::max(scale, 1e-300))
        throw ExtrapolationUnstable("jost: innermost samples are not in the r -> 0 regime");
    return static_cast<double>(2 * prob.l + 1) * c0;
}

JostPair jost_pair(const RadialProblem& prob, complex k) {
    JostPair p;
    p.k = k;
    p.f_plus = jost_function(prob, k, +1);
    p.f_minus = jost_function(prob, k, -1);
    return p;
}

complex partial_wave_smatrix(const RadialProblem& prob, complex k) {
    const JostPair p = jost_pair(prob, k);
    if (std::abs(p.f_plus) < 1e-12 * std::max(1.0, std::abs(p.f_minus)))
        throw AtPole("jost: f_+(k) vanishes; S matrix has a pole here");
    const double parity = (prob.l % 2 == 0) ? 1.0 : -1.0;
    return parity * p.f_minus / p.f_plus;
}

CrossSection cross_section_from_smatrix(const std::vector<complex>& s_values, double k,
                                        int n_theta) {
    if (!(k > 0.0)) throw Error("jost: cross sections need real k > 0");
    if (s_values.empty()) throw Error("jost: no partial waves given");
    if (n_theta < 2) throw Error("jost: need at least two angles");
    CrossSection cs;
    cs.s_values = s_values;
    const double pi = std::acos(-1.0);
    double last_term = 0.0;
    for (size_t l = 0; l < s_values.size(); ++l) {
        const double w = (2.0 * static_cast<double>(l) + 1.0) * std::norm(1.0 - s_values[l]);
        last_term = pi / (k * k) * w;
        cs.sigma_total += last_term;
    }
    cs.truncation_ratio = cs.sigma_total > 0.0 ? last_term / cs.sigma_total : 0.0;
    cs.theta.resize(static_cast<size_t>(n_theta));
    cs.dsigma_domega.resize(static_cast<size_t>(n_theta));
    for (int j = 0; j < n_theta; ++j) {
        const double theta = pi * j / (n_theta - 1);
        const double x = std::cos(theta);
        complex amp = 0.0;
        for (size_t l = 0; l < s_values.size(); ++l)
            amp += (2.0 * static_cast<double>(l) + 1.0) * (1.0 - s_values[l]) *
                   std::legendre(static_cast<unsigned>(l), x);
        cs.theta[static_cast<size_t>(j)] = theta;
        cs.dsigma_domega[static_cast<size_t>(j)] = std::norm(amp) / (4.0 * k * k);
    }
    return cs;
}

CrossSection cross_section(const RadialProblem& base, int l_max, double k, int n_theta) {
    if (l_max < 0) throw Error("jost: l_max must be non-negative");
    std::vector<complex> s_values;
    s_values.reserve(static_cast<size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l) {
        RadialProblem prob = base;
        prob.l = l;
        s_values.push_back(partial_wave_smatrix(prob, complex(k, 0.0)));
    }
    return cross_section_from_smatrix(s_values, k, n_theta);
}

namespace {

bool newton_zero(const RadialProblem& prob, complex& k, double step_tol) {
    double f_mag = std::abs(jost_function(prob, k, +1));
    for (int iter = 0; iter < 30; ++iter) {
        const complex f = jost_function(prob, k, +1);
        const double h = 1e-6 * (1.0 + std::abs(k));
        const complex fp = jost_function(prob, k + h, +1);
        const complex fm = jost_function(prob, k - h, +1);
        const complex df = (fp - fm) / (2.0 * h);
        if (std::abs(df) < 1e-300) return false;
        complex step = f / df;
        complex k_try = k - step;
        double f_try = std::abs(jost_function(prob, k_try, +1));
        int halvings = 0;
        while (f_try > f_mag && halvings < 8) {
            step *= 0.5;
            k_try = k - step;
            f_try = std::abs(jost_function(prob, k_try, +1));
            ++halvings;
        }
        k = k_try;
        f_mag = f_try;
        if (std::abs(step) < step_tol * (1.0 + std::abs(k))) return true;
    }
    return false;
}

}  // namespace

std::vector<ResonantState> pole_search(const RadialProblem& prob, const KRegion& region,
                                       PoleSearchDiagnostics* diag) {
    if (region.n_re < 1 || region.n_im < 1) throw Error("jost: empty search region");
    auto node = [&](int i, int j) {
        const double re = region.n_re == 1
                              ? region.re_min
                              : region.re_min + (region.re_max - region.re_min) * i / (region.n_re - 1.0);
        const double im = region.n_im == 1
                              ? region.im_min
                              : region.im_min + (region.im_max - region.im_min) * j / (region.n_im - 1.0);
        return complex(re, im);
    };

    std::vector<double> mag(static_cast<size_t>(region.n_re) * region.n_im);
    for (int j = 0; j < region.n_im; ++j)
        for (int i = 0; i < region.n_re; ++i)
            mag[static_cast<size_t>(j) * region.n_re + i] =
                std::abs(jost_function(prob, node(i, j), +1));
    auto at = [&](int i, int j) { return mag[static_cast<size_t>(j) * region.n_re + i]; };

    std::vector<complex> seeds;
    for (int j = 1; j + 1 < region.n_im; ++j)
        for (int i = 1; i + 1 < region.n_re; ++i) {
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj)
                for (int di = -1; di <= 1 && is_min; ++di)
                    if (di != 0 || dj != 0) is_min = at(i, j) < at(i + di, j + dj);
            if (is_min) seeds.push_back(node(i, j));
        }
    if (seeds.empty()) {
        const auto it = std::min_element(mag.begin(), mag.end());
        const auto idx = static_cast<int>(it - mag.begin());
        seeds.push_back(node(idx % region.n_re, idx / region.n_re));
    }

    const double margin_re =
        region.n_re > 1 ? (region.re_max - region.re_min) / (region.n_re - 1.0) : 1e-6;
    const double margin_im =
        region.n_im > 1 ? (region.im_max - region.im_min) / (region.n_im - 1.0) : 1e-6;

    std::vector<ResonantState> zeros;
    if (diag) *diag = PoleSearchDiagnostics{};
    for (complex seed : seeds) {
        if (diag) ++diag->seeds;
        complex k = seed;
        if (!newton_zero(prob, k, 1e-11)) {
            if (diag) ++diag->failed;
            continue;
        }
        if (k.real() < region.re_min - margin_re || k.real() > region.re_max + margin_re ||
            k.imag() < region.im_min - margin_im || k.imag() > region.im_max + margin_im)
            continue;
        bool duplicate = false;
        for (const ResonantState& z : zeros)
            if (std::abs(z.K.value() - k) < 1e-7 * (1.0 + std::abs(k))) duplicate = true;
        if (duplicate) continue;
        ResonantState state;
        state.K = ComplexWaveNumber{k.real(), -k.imag()};
        state.E = continuum_dispersion(state.K, prob.u);
        state.kind = classify_state(state.K, state.E);
        state.parity = Parity::none;
        state.residual = std::abs(jost_function(prob, k, +1));
        zeros.push_back(state);
    }
    std::sort(zeros.begin(), zeros.end(), [](const ResonantState& a, const ResonantState& b) {
        if (a.K.k != b.K.k) return a.K.k < b.K.k;
        return a.K.kappa < b.K.kappa;
    });
    return zeros;
}

}  // namespace siegert::jost
