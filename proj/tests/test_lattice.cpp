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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "siegert/lattice.hpp"

using namespace siegert;
using lattice::LatticeModel;

namespace {

/* Independent eigenvalue oracle: characteristic polynomial through the
 * Leverrier-Faddeev recurrence on hand-rolled matrices, roots through the
 * Aberth-Ehrlich simultaneous iteration. No linear-algebra library involved. */

struct SmallMat {
    int n = 0;
    std::vector<complex> a;  // row-major

    explicit SmallMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, complex(0.0)) {}
    complex& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    complex at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

SmallMat mat_mul(const SmallMat& A, const SmallMat& B) {
    SmallMat C(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int k = 0; k < A.n; ++k) {
            const complex aik = A.at(i, k);
            for (int j = 0; j < A.n; ++j) C.at(i, j) += aik * B.at(k, j);
        }
    return C;
}

complex mat_trace(const SmallMat& A) {
    complex t = 0.0;
    for (int i = 0; i < A.n; ++i) t += A.at(i, i);
    return t;
}

/* Coefficients of det(z I - A) in ascending powers of z (monic). */
std::vector<complex> characteristic_polynomial(const SmallMat& A) {
    const int n = A.n;
    std::vector<complex> c(static_cast<size_t>(n) + 1, complex(0.0));
    c[static_cast<size_t>(n)] = 1.0;
    SmallMat M(n);
    for (int i = 0; i < n; ++i) M.at(i, i) = 1.0;
    for (int k = 1; k <= n; ++k) {
        SmallMat AM = mat_mul(A, M);
        const complex ck = -mat_trace(AM) / static_cast<double>(k);
        c[static_cast<size_t>(n - k)] = ck;
        M = AM;
        for (int i = 0; i < n; ++i) M.at(i, i) += ck;
    }
    return c;
}

std::vector<complex> aberth_roots(std::vector<complex> coeffs) {
    while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    const int n = static_cast<int>(coeffs.size()) - 1;
    REQUIRE(n >= 1);
    auto eval = [&](complex z, complex& p, complex& dp) {
        p = coeffs[static_cast<size_t>(n)];
        dp = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            dp = dp * z + p;
            p = p * z + coeffs[static_cast<size_t>(i)];
        }
    };
    double radius = 0.0;
    for (int i = 0; i < n; ++i)
        radius = std::max(radius, 1.0 + std::abs(coeffs[static_cast<size_t>(i)] / coeffs.back()));
    std::vector<complex> z(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = radius * (0.4 + 0.5 * (i + 1.0) / n);
        z[static_cast<size_t>(i)] = std::polar(r, 2.0 * M_PI * i / n + 0.37);
    }
    for (int iter = 0; iter < 400; ++iter) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            complex p, dp;
            eval(z[static_cast<size_t>(i)], p, dp);
            if (std::abs(p) == 0.0) continue;
            const complex w = p / dp;
            complex repulsion = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) repulsion += 1.0 / (z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)]);
            const complex step = w / (1.0 - w * repulsion);
            z[static_cast<size_t>(i)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    // The oracle validates itself before it is trusted.
    for (const complex& root : z) {
        complex p, dp;
        eval(root, p, dp);
        CHECK(std::abs(p) <= 1e-8 * (1.0 + std::abs(coeffs.back()) * std::pow(std::abs(root), n)));
    }
    return z;
}

void check_same_multiset(std::vector<complex> got, const std::vector<complex>& want, double tol) {
    REQUIRE(got.size() == want.size());
    for (const complex& w : want) {
        size_t best = 0;
        for (size_t i = 1; i < got.size(); ++i)
            if (std::abs(got[i] - w) < std::abs(got[best] - w)) best = i;
        CHECK(std::abs(got[best] - w) <= tol);
        got.erase(got.begin() + static_cast<std::ptrdiff_t>(best));
    }
}

LatticeModel two_site_model(double v0 = 1.0) {
    LatticeModel m;
    m.half_width_L = 2;
    m.onsite = {{-1, v0}, {1, v0}};
    m.t_h = 1.0;
    return m;
}

/* Exact poles of the two-site chain at V0/t_h = 1, frozen from the cubic and
 * the half-chain matching condition. */
const complex Z_RES(0.43804294472104693, 1.0665842299315191);
const complex E_RES(-0.383763242839771, -0.132164836187054);
const double E_BOUND_EVEN = 1.517526485679543;
const double Z_BOUND_EVEN = -0.37608588944209337;

}  // namespace

TEST_CASE("lattice model validation") {
    LatticeModel m = two_site_model();
    CHECK_NOTHROW(m.validate());
    CHECK(m.dim() == 5);
    CHECK(m.onsite_at(-1) == 1.0);
    CHECK(m.onsite_at(0) == 0.0);

    m.onsite[2] = 1.0;  // on the boundary site
    CHECK_THROWS_AS(m.validate(), Error);
    m = two_site_model();
    m.t_h = 0.0;
    CHECK_THROWS_AS(m.validate(), Error);
    m = two_site_model();
    m.half_width_L = 0;
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("effective potential solves its quadratic and picks the right branch") {
    // V = -(t_h/2) z with z^2 + (2E/t_h) z + 1 = 0 implies
    // V^2 - E V + t_h^2/4 = 0 on either branch.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> re(-2.5, 2.5), im(0.05, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const complex E(re(rng), (trial % 2 ? 1.0 : -1.0) * im(rng));
        for (const LeadKind kind : {LeadKind::retarded_decaying, LeadKind::advanced_growing}) {
            const complex V = lattice::effective_potential(E, 1.0, kind);
            CHECK(std::abs(V * V - E * V + 0.25) <= 1e-12 * (1.0 + std::abs(E) * std::abs(E)));
        }
        // The two kinds are mirror continuations of each other.
        const complex vr = lattice::effective_potential(E, 1.0, LeadKind::retarded_decaying);
        const complex va = lattice::effective_potential(std::conj(E), 1.0, LeadKind::advanced_growing);
        CHECK(std::abs(va - std::conj(vr)) <= 1e-12);
    }

    // Real energy above the band: both kinds take the decaying tail.
    const complex v_bound =
        lattice::effective_potential(E_BOUND_EVEN, 1.0, LeadKind::retarded_decaying);
    CHECK(v_bound.real() == doctest::Approx(0.18804294472104668).epsilon(1e-13));
    CHECK(std::abs(v_bound.imag()) <= 1e-13);
    CHECK(std::abs(v_bound - (-0.5 * Z_BOUND_EVEN)) <= 1e-13);

    // At the exact resonance the branch with Im z > 0 reproduces the cubic root.
    const complex v_res = lattice::effective_potential(E_RES, 1.0, LeadKind::retarded_decaying);
    CHECK(std::abs(v_res - (-0.5 * Z_RES)) <= 1e-11);
    const complex v_anti =
        lattice::effective_potential(std::conj(E_RES), 1.0, LeadKind::advanced_growing);
    CHECK(std::abs(v_anti - (-0.5 * std::conj(Z_RES))) <= 1e-11);
}

TEST_CASE("assembled matrix layout") {
    const complex E(0.3, -0.2);
    const auto H = lattice::assemble(two_site_model(), E, LeadKind::retarded_decaying);
    REQUIRE(H.matrix.rows() == 5);
    REQUIRE(H.matrix.cols() == 5);
    const complex v_eff = lattice::effective_potential(E, 1.0, LeadKind::retarded_decaying);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            complex want = 0.0;
            if (std::abs(i - j) == 1) want = -0.5;
            if (i == j && (i == 1 || i == 3)) want = 1.0;
            if (i == j && (i == 0 || i == 4)) want = v_eff;
            CHECK(H.matrix(i, j) == want);
        }
    }
    CHECK(H.energy_used == E);
    CHECK(H.t_h == 1.0);
}

TEST_CASE("dense eigenvalues match the characteristic-polynomial oracle") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);

    SUBCASE("random dense matrix") {
        const int n = 7;
        SmallMat A(n);
        Eigen::MatrixXcd Ae(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                A.at(i, j) = complex(entry(rng), entry(rng));
                Ae(i, j) = A.at(i, j);
            }
        lattice::EffectiveHamiltonian H;
        H.matrix = Ae;
        const auto got = lattice::eigenvalues_small(H);
        const auto want = aberth_roots(characteristic_polynomial(A));
        check_same_multiset(got, want, 5e-9);
        CHECK(std::is_sorted(got.begin(), got.end(), [](const complex& a, const complex& b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        }));
    }

    SUBCASE("effective Hamiltonian of the two-site chain") {
        const complex E(-0.4, -0.15);
        const auto H = lattice::assemble(two_site_model(), E, LeadKind::retarded_decaying);
        SmallMat A(5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) A.at(i, j) = H.matrix(i, j);
        check_same_multiset(lattice::eigenvalues_small(H),
                            aberth_roots(characteristic_polynomial(A)), 5e-9);
    }
}

TEST_CASE("eigenpairs are backward stable") {
    const auto H = lattice::assemble(two_site_model(), complex(-0.4, -0.1),
                                     LeadKind::retarded_decaying);
    const double scale = H.matrix.norm();
    for (const auto& [lambda, v] : lattice::eigenpairs_small(H)) {
        CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
        CHECK((H.matrix * v - lambda * v).norm() <= 1e-10 * scale);
    }
}

TEST_CASE("dense solver dimension guard") {
    LatticeModel big;
    big.half_width_L = 32;  // dim 65
    const auto H = lattice::assemble(big, complex(0.1, -0.1), LeadKind::retarded_decaying);
    CHECK_THROWS_AS(lattice::eigenvalues_small(H), Error);
}

TEST_CASE("boundary eigenvector at the exact resonance") {
    const auto H = lattice::assemble(two_site_model(), E_RES, LeadKind::retarded_decaying);
    const auto v = lattice::boundary_eigenvector(H, E_RES, 0);
    REQUIRE(v.size() == 5);
    CHECK(v[2] == complex(1.0));
    CHECK((H.matrix * v - E_RES * v).norm() <= 1e-9 * v.norm());
    // Even state: mirror-symmetric amplitudes.
    CHECK(std::abs(v[0] - v[4]) <= 1e-9);
    CHECK(std::abs(v[1] - v[3]) <= 1e-9);

    CHECK_THROWS_AS(lattice::boundary_eigenvector(H, E_RES, 7), Error);
}

TEST_CASE("boundary eigenvector of the odd bound state") {
    // The odd state has a node at the origin, so it is anchored at site 1.
    const auto H = lattice::assemble(two_site_model(), complex(1.25, 0.0),
                                     LeadKind::retarded_decaying);
    const auto v = lattice::boundary_eigenvector(H, complex(1.25, 0.0), 1);
    CHECK(v[3] == complex(1.0));
    // Inverse iteration starts from a symmetric vector and reaches the odd
    // target only through rounding noise, so the tolerances here are loose.
    CHECK(std::abs(v[1] + v[3]) <= 1e-3);
    CHECK(std::abs(v[2]) <= 1e-3);
    CHECK((H.matrix * v - 1.25 * v).norm() <= 1e-3 * v.norm());
}

TEST_CASE("polynomial roots") {
    SUBCASE("known factorizations") {
        const auto r1 = lattice::polynomial_roots({-1.0, 0.0, 1.0});
        REQUIRE(r1.size() == 2);
        CHECK(std::abs(r1[0] - complex(-1.0)) <= 1e-12);
        CHECK(std::abs(r1[1] - complex(1.0)) <= 1e-12);

        const auto r2 = lattice::polynomial_roots({6.0, -5.0, 1.0});
        check_same_multiset(r2, {complex(2.0), complex(3.0)}, 1e-12);

        const auto r3 = lattice::polynomial_roots({1.0, 1.0});
        REQUIRE(r3.size() == 1);
        CHECK(std::abs(r3[0] - complex(-1.0)) <= 1e-14);

        // Trailing zero coefficients do not change the roots.
        const auto r4 = lattice::polynomial_roots({6.0, -5.0, 1.0, 0.0, 0.0});
        check_same_multiset(r4, {complex(2.0), complex(3.0)}, 1e-12);
    }

    SUBCASE("random polynomial against the oracle") {
        std::mt19937 rng(41);
        std::uniform_real_distribution<double> entry(-1.0, 1.0);
        std::vector<complex> coeffs;
        for (int i = 0; i < 7; ++i) coeffs.emplace_back(entry(rng), entry(rng));
        check_same_multiset(lattice::polynomial_roots(coeffs), aberth_roots(coeffs), 1e-9);
    }

    SUBCASE("degenerate inputs") {
        CHECK_THROWS_AS(lattice::polynomial_roots({}), Error);
        CHECK_THROWS_AS(lattice::polynomial_roots({complex(3.0)}), Error);
        CHECK_THROWS_AS(lattice::polynomial_roots({complex(0.0), complex(0.0)}), Error);
    }
}

TEST_CASE("determinant scan flags the resonance cell") {
    lattice::ComplexRectangle grid;
    grid.re_min = -0.7;
    grid.re_max = -0.1;
    grid.n_re = 61;
    grid.im_min = -0.35;
    grid.im_max = -0.02;
    grid.n_im = 61;
    const auto scan = lattice::determinant_scan(two_site_model(), grid);
    REQUIRE(scan.re_grid.size() == 61);
    REQUIRE(scan.im_grid.size() == 61);
    REQUIRE(scan.log10_abs_det.size() == 61u * 61u);
    REQUIRE(!scan.minima.empty());
    const double dre = scan.re_grid[1] - scan.re_grid[0];
    const double dim_step = scan.im_grid[1] - scan.im_grid[0];
    CHECK(std::abs(scan.minima[0].real() - E_RES.real()) <= dre * 1.5);
    CHECK(std::abs(scan.minima[0].imag() - E_RES.imag()) <= dim_step * 1.5);
}

TEST_CASE("determinant scan dips at the bound-state energy") {
    lattice::ComplexRectangle grid;
    grid.re_min = 1.3;
    grid.re_max = 1.7;
    grid.n_re = 801;  // fine enough that a grid point lands ~3e-5 from the pole
    grid.im_min = -0.04;
    grid.im_max = 0.04;
    grid.n_im = 5;
    const auto scan = lattice::determinant_scan(two_site_model(), grid);
    // Value at the grid point nearest the bound energy, on the real axis row.
    size_t i_b = 0;
    for (size_t i = 1; i < scan.re_grid.size(); ++i)
        if (std::abs(scan.re_grid[i] - E_BOUND_EVEN) <
            std::abs(scan.re_grid[i_b] - E_BOUND_EVEN))
            i_b = i;
    const double at_bound = scan.at(static_cast<int>(i_b), 2);
    std::vector<double> row;
    for (int i = 0; i < 801; ++i) row.push_back(scan.at(i, 2));
    std::nth_element(row.begin(), row.begin() + 400, row.end());
    CHECK(at_bound < row[400] - 2.0);
    for (const double v : scan.log10_abs_det) CHECK(std::isfinite(v));

    lattice::ComplexRectangle bad;
    bad.n_re = 0;
    bad.n_im = 1;
    CHECK_THROWS_AS(lattice::determinant_scan(two_site_model(), bad), Error);
}

TEST_CASE("cycle detector") {
    const double tol = 1e-12;
    CHECK_FALSE(lattice::detail::detect_cycle({complex(1.0), complex(2.0)}, tol));
    // Converging sequences are not cycles.
    CHECK_FALSE(lattice::detail::detect_cycle(
        {complex(1.0), complex(0.6), complex(0.55), complex(0.55 + 1e-13)}, tol));
    // Period-two orbit.
    CHECK(lattice::detail::detect_cycle(
        {complex(1.0), complex(2.0), complex(1.0 + 1e-15), complex(2.0 + 1e-15)}, tol));
    // A wandering sequence is not a cycle.
    CHECK_FALSE(lattice::detail::detect_cycle(
        {complex(1.0), complex(2.0), complex(3.0), complex(4.0)}, tol));
}

TEST_CASE("self-consistent pole iteration finds the resonance") {
    const auto [state, trace] =
        lattice::self_consistent_pole(two_site_model(), complex(-0.3, -0.1));
    CHECK(trace.converged);
    CHECK(trace.iterations <= 40);
    CHECK(std::abs(state.E.value() - E_RES) <= 1e-11);
    CHECK(state.kind == StateKind::resonant);
    CHECK(state.E.gamma() > 0.0);

    // Linear contraction: the update size shrinks monotonically after the
    // first step.
    for (size_t i = 1; i < trace.residuals.size(); ++i)
        CHECK(trace.residuals[i] < trace.residuals[i - 1]);
    CHECK(trace.postulates.size() == trace.residuals.size() + 1);

    // Fixed point: E* is an eigenvalue of H(E*), and the boundary factor
    // solves the even-sector cubic.
    const auto H = lattice::assemble(two_site_model(), state.E.value(),
                                     LeadKind::retarded_decaying);
    double closest = 1e300;
    for (const complex& lam : lattice::eigenvalues_small(H))
        closest = std::min(closest, std::abs(lam - state.E.value()));
    CHECK(closest <= 1e-10);

    const complex z = lead_phase_factor(state.E.value(), 1.0, LeadKind::retarded_decaying);
    complex cubic = 0.0;
    for (const complex c : {complex(2.0), complex(-1.0), complex(2.0), complex(1.0)})
        cubic = cubic * z + c;
    CHECK(std::abs(cubic) <= 1e-11);
    CHECK(std::abs(lattice::effective_potential(state.E.value(), 1.0,
                                                LeadKind::retarded_decaying) -
                   (-0.5 * Z_RES)) <= 1e-11);
}

TEST_CASE("self-consistent pole iteration finds the bound state from a real seed") {
    const auto [state, trace] =
        lattice::self_consistent_pole(two_site_model(), complex(1.4, 0.0));
    CHECK(trace.converged);
    CHECK(std::abs(state.E.value() - complex(E_BOUND_EVEN, 0.0)) <= 1e-11);
    CHECK(state.kind == StateKind::bound);
    CHECK(state.K.kappa < 0.0);
}

TEST_CASE("advanced continuation finds the time-reversed pole") {
    const auto [state, trace] = lattice::self_consistent_pole(
        two_site_model(), std::conj(complex(-0.3, -0.1)), 1e-12, 60,
        LeadKind::advanced_growing);
    CHECK(trace.converged);
    CHECK(std::abs(state.E.value() - std::conj(E_RES)) <= 1e-11);
    CHECK(state.kind == StateKind::anti_resonant);
}

TEST_CASE("mixing keeps the same fixed point") {
    const auto [plain, t1] = lattice::self_consistent_pole(two_site_model(), complex(-0.3, -0.1));
    const auto [mixed, t2] = lattice::self_consistent_pole(
        two_site_model(), complex(-0.3, -0.1), 1e-12, 200, LeadKind::retarded_decaying, 0.5);
    CHECK(std::abs(plain.E.value() - mixed.E.value()) <= 1e-10);
    CHECK(t2.iterations >= t1.iterations);
}

TEST_CASE("pole iteration failure reporting") {
    CHECK_THROWS_AS(lattice::self_consistent_pole(two_site_model(), complex(-0.3, -0.1), -1.0),
                    Error);
    CHECK_THROWS_AS(lattice::self_consistent_pole(two_site_model(), complex(-0.3, -0.1), 1e-12, 0),
                    Error);
    CHECK_THROWS_AS(lattice::self_consistent_pole(two_site_model(), complex(-0.3, -0.1), 1e-12,
                                                  60, LeadKind::retarded_decaying, 1.5),
                    Error);

    try {
        lattice::self_consistent_pole(two_site_model(), complex(-0.3, -0.1), 1e-12, 3);
        FAIL("expected NotConverged");
    } catch (const lattice::NotConverged& e) {
        CHECK(e.trace.iterations == 3);
        CHECK(e.trace.postulates.size() == 4);
        CHECK(e.trace.residuals.size() == 3);
        CHECK_FALSE(e.trace.converged);
    }
}

TEST_CASE("exact two-site reference") {
    const auto states = lattice::exact_two_site_reference(1.0);
    REQUIRE(states.size() == 4);

    CHECK(states[0].parity == Parity::odd);
    CHECK(states[0].kind == StateKind::bound);
    CHECK(std::abs(states[0].E.value() - 1.25) == 0.0);
    CHECK(states[0].K.k == doctest::Approx(M_PI).epsilon(1e-15));
    CHECK(states[0].K.kappa == doctest::Approx(std::log(0.5)).epsilon(1e-15));

    CHECK(states[1].parity == Parity::even);
    CHECK(states[1].kind == StateKind::bound);
    CHECK(std::abs(states[1].E.value() - complex(E_BOUND_EVEN, 0.0)) <= 1e-12);

    CHECK(states[2].kind == StateKind::resonant);
    CHECK(std::abs(states[2].E.value() - E_RES) <= 1e-12);
    CHECK(states[3].kind == StateKind::anti_resonant);
    CHECK(std::abs(states[3].E.value() - std::conj(E_RES)) <= 1e-12);

    for (const auto& st : states) {
        CHECK(st.residual <= 1e-13);
        // K and E are two encodings of the same pole.
        const complex z = std::exp(complex(st.K.kappa, st.K.k));
        CHECK(std::abs(st.E.value() + 0.5 * (z + 1.0 / z)) <= 1e-12);
    }

    CHECK_THROWS_AS(lattice::exact_two_site_reference(0.0), Error);
    CHECK_THROWS_AS(lattice::exact_two_site_reference(-1.0), Error);
}

TEST_CASE("exact two-site reference against the oracle at another coupling") {
    const double v = 10.0;
    const auto states = lattice::exact_two_site_reference(v);
    REQUIRE(states.size() == 4);
    const auto cubic_roots =
        aberth_roots({complex(1.0), complex(2.0 * v), complex(-1.0), complex(2.0 * v)});
    std::vector<complex> got_even_z;
    for (size_t i = 1; i < 4; ++i)
        got_even_z.push_back(std::exp(complex(states[i].K.kappa, states[i].K.k)));
    check_same_multiset(got_even_z, cubic_roots, 1e-9);
    CHECK(std::abs(std::exp(complex(states[0].K.kappa, states[0].K.k)) -
                   complex(-0.05, 0.0)) <= 1e-12);
}
