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

#include "siegert/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace siegert::lattice {

double LatticeModel::onsite_at(int site) const {
    auto it = onsite.find(site);
    return it == onsite.end() ? 0.0 : it->second;
}

void LatticeModel::validate() const {
    if (half_width_L < 1) throw Error("lattice: half_width_L must be at least 1");
    if (!(t_h > 0.0) || !std::isfinite(t_h)) throw Error("lattice: hopping t_h must be positive");
    for (const auto& [site, v] : onsite) {
        if (std::abs(site) >= half_width_L)
            throw Error("lattice: onsite potential at site " + std::to_string(site) +
                        " is not strictly inside the boundaries");
        if (!std::isfinite(v)) throw Error("lattice: onsite potential must be finite");
    }
}

complex effective_potential(complex E, double t_h, LeadKind kind) {
    return -0.5 * t_h * lead_phase_factor(E, t_h, kind);
}

EffectiveHamiltonian assemble(const LatticeModel& model, complex E, LeadKind kind) {
    model.validate();
    const int n = model.dim();
    EffectiveHamiltonian H;
    H.matrix = Eigen::MatrixXcd::Zero(n, n);
    H.energy_used = E;
    H.t_h = model.t_h;
    H.kind = kind;
    for (int i = 0; i < n; ++i) {
        const int site = i - model.half_width_L;
        H.matrix(i, i) = model.onsite_at(site);
        if (i + 1 < n) {
            H.matrix(i, i + 1) = -0.5 * model.t_h;
            H.matrix(i + 1, i) = -0.5 * model.t_h;
        }
    }
    const complex v_eff = effective_potential(E, model.t_h, kind);
    H.matrix(0, 0) = v_eff;
    H.matrix(n - 1, n - 1) = v_eff;
    return H;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = lo + step * i;
    g.back() = hi;
    return g;
}

double log10_abs_determinant(const Eigen::MatrixXcd& M) {
    // Partial-pivot LU; |det| = prod |U_ii|, accumulated in log10 so deep
    // minima do not underflow.
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    double acc = 0.0;
    const auto diag = lu.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const double a = std::abs(diag[i]);
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        acc += std::log10(a);
    }
    return acc;
}

}  // namespace

DeterminantScan determinant_scan(const LatticeModel& model, const ComplexRectangle& grid,
                                 LeadKind kind) {
    model.validate();
    if (grid.n_re < 1 || grid.n_im < 1) throw Error("lattice: determinant mesh must be non-empty");
    if (!std::isfinite(grid.re_min) || !std::isfinite(grid.re_max) ||
        !std::isfinite(grid.im_min) || !std::isfinite(grid.im_max))
        throw Error("lattice: determinant mesh bounds must be finite");
    DeterminantScan scan;
    scan.re_grid = linspace(grid.re_min, grid.re_max, grid.n_re);
    scan.im_grid = linspace(grid.im_min, grid.im_max, grid.n_im);
    scan.log10_abs_det.resize(static_cast<size_t>(grid.n_re) * grid.n_im);
    const int n = model.dim();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
    for (int j = 0; j < grid.n_im; ++j) {
        for (int i = 0; i < grid.n_re; ++i) {
            const complex E(scan.re_grid[static_cast<size_t>(i)],
                            scan.im_grid[static_cast<size_t>(j)]);
            const EffectiveHamiltonian H = assemble(model, E, kind);
            scan.log10_abs_det[static_cast<size_t>(j) * grid.n_re + i] =
                log10_abs_determinant(H.matrix - E * eye);
        }
    }
    // Strict local minima over the 8-neighbour stencil mark pole candidates.
    std::vector<std::pair<double, complex>> dimples;
    for (int j = 1; j + 1 < grid.n_im; ++j) {
        for (int i = 1; i + 1 < grid.n_re; ++i) {
            const double c = scan.at(i, j);
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj)
                for (int di = -1; di <= 1 && is_min; ++di)
                    if (di != 0 || dj != 0) is_min = c < scan.at(i + di, j + dj);
            if (is_min)
                dimples.emplace_back(c, complex(scan.re_grid[static_cast<size_t>(i)],
                                                scan.im_grid[static_cast<size_t>(j)]));
        }
    }
    std::sort(dimples.begin(), dimples.end(), [](const auto& a, const auto& b) {
        return a.first < b.first;
    });
    scan.minima.reserve(dimples.size());
    for (const auto& [depth, where] : dimples) scan.minima.push_back(where);
    return scan;
}

namespace {

Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solve_dense(const Eigen::MatrixXcd& M,
                                                        bool vectors) {
    if (M.rows() != M.cols()) throw Error("lattice: eigenproblem matrix must be square");
    if (M.rows() > 64) throw Error("lattice: dense eigensolver is limited to dimension 64");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M, vectors);
    if (solver.info() != Eigen::Success)
        throw NoConvergenceQR("lattice: QR eigenvalue iteration did not converge");
    return solver;
}

bool eigen_order(const complex& a, const complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

std::vector<complex> eigenvalues_small(const EffectiveHamiltonian& H) {
    const auto solver = solve_dense(H.matrix, false);
    std::vector<complex> out(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(out.begin(), out.end(), eigen_order);
    return out;
}

std::vector<std::pair<complex, Eigen::VectorXcd>> eigenpairs_small(const EffectiveHamiltonian& H) {
    const auto solver = solve_dense(H.matrix, true);
    std::vector<std::pair<complex, Eigen::VectorXcd>> out;
    out.reserve(static_cast<size_t>(solver.eigenvalues().size()));
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        Eigen::VectorXcd v = solver.eigenvectors().col(i);
        v /= v.norm();
        out.emplace_back(solver.eigenvalues()[i], std::move(v));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return eigen_order(a.first, b.first); });
    return out;
}

Eigen::VectorXcd boundary_eigenvector(const EffectiveHamiltonian& H, complex lambda,
                                      int normalize_site) {
    const Eigen::Index n = H.matrix.rows();
    const int half = static_cast<int>(n - 1) / 2;
    if (normalize_site < -half || normalize_site > half)
        throw Error("lattice: normalization site outside the chain");
    // Inverse iteration with a slightly detuned shift; two rounds suppress the
    // other eigendirections by roughly (shift detuning / spectral gap)^2.
    const complex shift = lambda + 1e-11 * (1.0 + std::abs(lambda));
    const Eigen::MatrixXcd M =
        H.matrix - shift * Eigen::MatrixXcd::Identity(n, n);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    v /= v.norm();
    for (int round = 0; round < 2; ++round) {
        v = lu.solve(v);
        const double s = v.norm();
        if (!std::isfinite(s) || s == 0.0)
            throw Error("lattice: inverse iteration broke down (shift too close to singular)");
        v /= s;
    }
    const complex anchor = v[normalize_site + half];
    if (std::abs(anchor) < 1e-12)
        throw Error("lattice: eigenvector has a node at the requested normalization site");
    return v / anchor;
}

std::vector<complex> polynomial_roots(const std::vector<complex>& coeffs) {
    size_t degree = coeffs.size();
    while (degree > 0 && std::abs(coeffs[degree - 1]) == 0.0) --degree;
    if (degree < 2) throw Error("lattice: polynomial must have degree at least 1");
    --degree;  // index of the leading coefficient
    const size_t n = degree;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                        static_cast<Eigen::Index>(n));
    for (size_t i = 1; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (size_t i = 0; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) =
            -coeffs[i] / coeffs[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw NoConvergenceQR("lattice: companion-matrix eigensolve did not converge");
    std::vector<complex> roots(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + solver.eigenvalues().size());
    // One Newton polish per root tightens the companion eigenvalues to
    // near-machine residuals.
    for (complex& z : roots) {
        for (int step = 0; step < 2; ++step) {
            complex p = 0.0, dp = 0.0;
            for (size_t i = n + 1; i-- > 0;) {
                dp = dp * z + p;
                p = p * z + coeffs[i];
            }
            if (std::abs(dp) == 0.0) break;
            const complex delta = p / dp;
            if (!std::isfinite(std::abs(delta))) break;
            z -= delta;
        }
    }
    std::sort(roots.begin(), roots.end(), eigen_order);
    return roots;
}

namespace detail {

bool detect_cycle(const std::vector<complex>& postulates, double tol) {
    const size_t n = postulates.size();
    if (n < 4) return false;
    const complex last = postulates[n - 1];
    if (std::abs(last - postulates[n - 2]) <= tol) return false;  // converging, not cycling
    for (size_t i = 0; i + 2 < n; ++i)
        if (std::abs(postulates[i] - last) < tol) return true;
    return false;
}

}  // namespace detail

std::pair<ResonantState, IterationTrace> self_consistent_pole(const LatticeModel& model,
                                                              complex E0, double tol,
                                                              int max_iter, LeadKind kind,
                                                              double beta) {
    model.validate();
    if (!(tol > 0.0)) throw Error("lattice: tolerance must be positive");
    if (max_iter < 1) throw Error("lattice: max_iter must be at least 1");
    if (!(beta > 0.0) || beta > 1.0) throw Error("lattice: mixing beta must lie in (0, 1]");
    if (!std::isfinite(std::abs(E0))) throw Error("lattice: starting energy must be finite");

    IterationTrace trace;
    trace.postulates.push_back(E0);
    complex E_prev = E0;
    for (int q = 1; q <= max_iter; ++q) {
        const EffectiveHamiltonian H = assemble(model, E_prev, kind);
        const std::vector<complex> eigs = eigenvalues_small(H);
        // Closest eigenvalue to the postulate; near-ties resolved toward the
        // slower-decaying (smaller |Im|) state.
        complex pick = eigs.front();
        double best = std::abs(pick - E_prev);
        for (const complex& lam : eigs) {
            const double d = std::abs(lam - E_prev);
            if (d < best - 1e-14 ||
                (std::abs(d - best) <= 1e-14 && std::abs(lam.imag()) < std::abs(pick.imag()))) {
                best = d;
                pick = lam;
            }
        }
        const complex E_next = (1.0 - beta) * E_prev + beta * pick;
        const double residual = std::abs(E_next - E_prev);
        trace.postulates.push_back(E_next);
        trace.residuals.push_back(residual);
        trace.iterations = q;
        if (residual < tol) {
            trace.converged = true;
            E_prev = E_next;
            break;
        }
        if (detail::detect_cycle(trace.postulates, tol))
            throw OscillationDetected("lattice: postulate sequence entered a cycle", trace);
        E_prev = E_next;
    }
    if (!trace.converged)
        throw NotConverged("lattice: pole iteration did not reach tolerance in " +
                               std::to_string(max_iter) + " steps",
                           trace);

    ResonantState state;
    state.E = ComplexEnergy::from_value(E_prev);
    Units u;
    u.hopping_th = model.t_h;
    state.K = lattice_wavenumber(state.E, u, kind);
    state.kind = classify_state(state.K, state.E);
    state.parity = Parity::none;
    state.residual = trace.residuals.back();
    return {state, trace};
}

std::vector<ResonantState> exact_two_site_reference(double V0_over_th) {
    if (!(V0_over_th > 0.0)) throw Error("lattice: V0/t_h must be positive");
    const double v = V0_over_th;

    auto from_phase = [](complex z, Parity parity, double residual) {
        ResonantState s;
        s.K = ComplexWaveNumber{std::arg(z), std::log(std::abs(z))};
        s.E = ComplexEnergy::from_value(-0.5 * (z + 1.0 / z));
        s.kind = classify_state(s.K, s.E);
        s.parity = parity;
        s.residual = residual;
        return s;
    };

    std::vector<ResonantState> out;
    // Odd sector: the node at the origin decouples the two half-chains and the
    // matching condition collapses to z = -1/(2 V0~).
    out.push_back(from_phase(complex(-0.5 / v, 0.0), Parity::odd, 0.0));

    // Even sector: 2 V0~ z^3 - z^2 + 2 V0~ z + 1 = 0.
    const std::vector<complex> cubic = {1.0, 2.0 * v, -1.0, 2.0 * v};
    std::vector<complex> roots = polynomial_roots(cubic);
    std::sort(roots.begin(), roots.end(), [](const complex& a, const complex& b) {
        auto rank = [](const complex& z) {
            const double im_E = std::imag(-0.5 * (z + 1.0 / z));
            if (std::abs(im_E) <= 1e-12) return 0;  // real energy first
            return im_E < 0.0 ? 1 : 2;              // then decaying, then growing
        };
        if (rank(a) != rank(b)) return rank(a) < rank(b);
        return a.real() < b.real();
    });
    for (const complex& z : roots) {
        complex p = 0.0;
        for (size_t i = cubic.size(); i-- > 0;) p = p * z + cubic[i];
        out.push_back(from_phase(z, Parity::even, std::abs(p)));
    }
    return out;
}

}  // namespace siegert::lattice
