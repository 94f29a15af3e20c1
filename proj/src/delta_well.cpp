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

#include "siegert/delta_well.hpp"

#include <algorithm>
#include <cmath>

namespace siegert::delta_well {

namespace {

constexpr complex I{0.0, 1.0};

double parity_sign(Parity parity) {
    if (parity == Parity::even) return 1.0;
    if (parity == Parity::odd) return -1.0;
    throw std::invalid_argument("double delta: parity must be even or odd");
}

complex equation(double alpha, double sign, complex zeta) {
    return 1.0 - 2.0 * I * alpha * zeta + sign * std::exp(2.0 * I * zeta);
}

complex equation_derivative(double alpha, double sign, complex zeta) {
    return -2.0 * I * alpha + sign * 2.0 * I * std::exp(2.0 * I * zeta);
}

/** Damped Newton iteration on the parity equation; returns the root or
 *  nothing if it fails to reach |F| < tol within max_iter steps. */
std::optional<complex> newton_root(double alpha, double sign, complex zeta, double tol,
                                   int max_iter = 60) {
    complex f = equation(alpha, sign, zeta);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(f) < tol) return zeta;
        const complex fp = equation_derivative(alpha, sign, zeta);
        if (fp == complex(0.0, 0.0)) return std::nullopt;
        complex step = f / fp;
        complex next = zeta - step;
        complex fnext = equation(alpha, sign, next);
        for (int halving = 0; halving < 10 && std::abs(fnext) > std::abs(f); ++halving) {
            step *= 0.5;
            next = zeta - step;
            fnext = equation(alpha, sign, next);
        }
        zeta = next;
        f = fnext;
    }
    return std::abs(f) < tol ? std::optional<complex>(zeta) : std::nullopt;
}

ResonantState make_state(const DoubleDeltaModel& model, Parity parity, complex zeta,
                         double residual) {
    ResonantState st;
    st.K = ComplexWaveNumber::from_value(zeta / model.l);
    Units u;  // hbar = m = 1; K carries the 1/l scale already
    st.E = continuum_dispersion(st.K, u);
    st.parity = parity;
    st.kind = classify_state(st.K, st.E);
    st.residual = residual;
    return st;
}

}  // namespace

void DoubleDeltaModel::validate() const {
    if (!(a_over_l > 0.0) || !(l > 0.0)) {
        throw std::invalid_argument("double delta: a/l and l must be positive");
    }
}

complex root_equation(const DoubleDeltaModel& model, Parity parity, complex zeta) {
    model.validate();
    return equation(model.a_over_l, parity_sign(parity), zeta);
}

bool modulus_curve_is_split(const DoubleDeltaModel& model) {
    // The curve e^{4 eta} = (1 - 2 alpha eta)^2 + (2 alpha xi)^2 splits into
    // two branches when e^{2 eta} = 2 alpha eta - 1 has two positive
    // solutions, i.e. when the line lies above the exponential at the point
    // of tangency. That happens exactly for alpha (ln alpha - 1) > 1.
    const double alpha = model.a_over_l;
    if (alpha <= 1.0) return false;
    return alpha * (std::log(alpha) - 1.0) > 1.0;
}

std::vector<ResonantState> siegert_roots(const DoubleDeltaModel& model, Parity parity,
                                         double xi_min, double xi_max, double tol,
                                         bool include_mirrors, RootSearchDiagnostics* diag) {
    model.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("double delta: tol must be positive");
    if (!(xi_max > xi_min) || !(xi_max > 0.0)) {
        throw EmptyWindow("double delta: root window is empty");
    }
    const double alpha = model.a_over_l;
    const double sign = parity_sign(parity);

    if (diag) {
        diag->failed_seeds = 0;
        diag->closed_branch = modulus_curve_is_split(model);
    }

    // Roots sit near zeta = n pi (odd) or (n + 1/2) pi (even) with an
    // a/l-dependent negative imaginary part. A fan of imaginary offsets per
    // base covers everything from the nearly real roots at small a/l to the
    // deep roots at a/l ~ 10.
    static const double offsets[] = {-0.1, -0.6, -1.2, -2.0, -3.0};
    const double pi = std::acos(-1.0);
    const double base_shift = (parity == Parity::even) ? 0.5 * pi : 0.0;

    std::vector<complex> roots;
    const int n_lo = std::max(0, static_cast<int>(std::floor(xi_min / pi)) - 1);
    const int n_hi = static_cast<int>(std::ceil(xi_max / pi)) + 1;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double base = n * pi + base_shift;
        for (double off : offsets) {
            const auto found = newton_root(alpha, sign, complex(base, off), tol);
            if (!found) {
                if (diag) ++diag->failed_seeds;
                continue;
            }
            complex zeta = *found;
            // The odd equation has the spurious solution zeta = 0; reject it
            // along with anything outside the window or not decaying.
            if (std::abs(zeta) < 1e-6) continue;
            // Complex Newton cannot land exactly on the imaginary axis, where
            // the equation is real-valued. Polish near-axis (anti-bound) roots
            // there in real arithmetic so they carry Re K = 0 exactly.
            if (std::abs(zeta.real()) < 1e-8 * (1.0 + std::abs(zeta))) {
                double y = -zeta.imag();
                for (int it = 0; it < 30; ++it) {
                    const double g = 1.0 - 2.0 * alpha * y + sign * std::exp(2.0 * y);
                    const double gp = -2.0 * alpha + sign * 2.0 * std::exp(2.0 * y);
                    if (gp == 0.0) break;
                    const double step = g / gp;
                    y -= step;
                    if (!(std::abs(step) > 1e-16 * (1.0 + std::abs(y)))) break;
                }
                if (y > 0.0) zeta = complex(0.0, -y);
            }
            if (zeta.imag() >= 0.0) continue;
            if (zeta.real() < xi_min || zeta.real() >= xi_max) continue;
            const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](complex r) {
                return std::abs(r - zeta) < 1e-8;
            });
            if (!duplicate) roots.push_back(zeta);
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](complex a, complex b) { return a.real() < b.real(); });

    std::vector<ResonantState> states;
    states.reserve(roots.size() * (include_mirrors ? 2 : 1));
    for (complex zeta : roots) {
        states.push_back(make_state(model, parity, zeta, std::abs(equation(alpha, sign, zeta))));
    }
    if (include_mirrors) {
        // The mirrored wave number -conj(zeta) satisfies the same parity
        // equation; it describes the time-reversed (anti-resonant) partner.
        for (complex zeta : roots) {
            const complex mirror = -std::conj(zeta);
            states.push_back(
                make_state(model, parity, mirror, std::abs(equation(alpha, sign, mirror))));
        }
    }
    return states;
}

std::vector<ParityCurveSample> parity_curves(const DoubleDeltaModel& model,
                                             const std::vector<double>& xi_grid) {
    model.validate();
    const double alpha = model.a_over_l;
    const double beta = 2.0 * alpha;

    std::vector<ParityCurveSample> samples;
    samples.reserve(xi_grid.size());
    for (double xi : xi_grid) {
        if (!(xi > 0.0)) throw std::invalid_argument("parity curves: xi grid must be positive");
        ParityCurveSample s;
        s.xi = xi;
        s.eta_fixed_point = 1.0 / beta + xi / std::tan(2.0 * xi);

        // eta roots of q(eta) = e^{4 eta} - (1 - beta eta)^2 - (beta xi)^2,
        // located by a sign scan plus bisection. The upper end of the scan is
        // generous: beyond eta ~ ln(beta xi)/2 + 1 the exponential dominates.
        const auto q = [&](double eta) {
            const double lin = 1.0 - beta * eta;
            return std::exp(4.0 * eta) - lin * lin - beta * beta * xi * xi;
        };
        const double eta_hi =
            std::max(2.0, 0.5 * std::log(std::max(beta * xi, 1.0) + 1.0) + 0.5 * beta);
        const int n_scan = 4000;
        double prev_eta = 0.0;
        double prev_q = q(0.0);
        for (int i = 1; i <= n_scan; ++i) {
            const double eta = eta_hi * i / n_scan;
            const double qi = q(eta);
            if ((prev_q < 0.0) != (qi < 0.0)) {
                double lo = prev_eta, hi = eta;
                for (int b = 0; b < 80; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    if ((q(lo) < 0.0) != (q(mid) < 0.0)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                s.eta_circle.push_back(0.5 * (lo + hi));
            }
            prev_eta = eta;
            prev_q = qi;
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

SMatrix s_matrix(const DoubleDeltaModel& model, ComplexWaveNumber K) {
    model.validate();
    const double alpha = model.a_over_l;
    const complex zeta = K.value() * model.l;
    const complex m = 2.0 * I * alpha * zeta - 1.0;
    const complex denom = m * m - std::exp(4.0 * I * zeta);
    if (std::abs(denom) < 1e-13) {
        throw AtPole("s_matrix: K is a pole of the S matrix (Siegert root)");
    }
    SMatrix s;
    s.r = (4.0 * I * alpha * zeta * std::cos(2.0 * zeta) + 2.0 * I * std::sin(2.0 * zeta)) / denom;
    s.t = -4.0 * alpha * alpha * zeta * zeta / denom;
    return s;
}

std::vector<std::pair<double, double>> transmission_scan(const DoubleDeltaModel& model,
                                                         const std::vector<double>& k_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) {
        if (!(k > 0.0)) throw std::invalid_argument("transmission scan: k grid must be positive");
        const auto s = s_matrix(model, ComplexWaveNumber{k, 0.0});
        out.emplace_back(k, std::norm(s.t));
    }
    return out;
}

}  // namespace siegert::delta_well
