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

/** @file lattice.hpp
 *  @brief Tight-binding chains truncated by energy-dependent boundary
 *    potentials: assembly of the effective non-Hermitian Hamiltonian, the
 *    determinant landscape of the pole condition, small dense eigensolves,
 *    the self-consistent pole iteration, and the exact two-site reference.
 *
 *  The chain Hamiltonian is -t_h/2 on nearest-neighbour bonds with on-site
 *  potentials inside |x| < L; truncation at x = +-L is exact for a state of
 *  energy E once the boundary site carries V_eff(E) = -(t_h/2) e^{iK dx},
 *  the self-energy of the discarded semi-infinite lead.
 */

#ifndef SIEGERT_LATTICE_HPP
#define SIEGERT_LATTICE_HPP

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "siegert/core.hpp"

namespace siegert::lattice {

struct LatticeModel {
    int half_width_L = 1;
    std::map<int, double> onsite;  // support strictly inside |x| < L
    double t_h = 1.0;

    int dim() const { return 2 * half_width_L + 1; }
    double onsite_at(int site) const;
    void validate() const;
};

struct EffectiveHamiltonian {
    Eigen::MatrixXcd matrix;
    complex energy_used;
    double t_h = 1.0;
    LeadKind kind = LeadKind::retarded_decaying;
};

struct IterationTrace {
    std::vector<complex> postulates;  // E^(0), E^(1), ...
    std::vector<double> residuals;    // |E^(q) - E^(q-1)|
    bool converged = false;
    int iterations = 0;
};

struct ComplexRectangle {
    double re_min = 0.0, re_max = 0.0;
    int n_re = 0;
    double im_min = 0.0, im_max = 0.0;
    int n_im = 0;
};

struct DeterminantScan {
    std::vector<double> re_grid, im_grid;
    std::vector<double> log10_abs_det;  // row-major, index = i_im * n_re + i_re
    std::vector<complex> minima;        // grid-local minima, deepest first
    double at(int i_re, int i_im) const {
        return log10_abs_det[static_cast<size_t>(i_im) * re_grid.size() +
                             static_cast<size_t>(i_re)];
    }
};

struct NoConvergenceQR : Error {
    using Error::Error;
};
struct NotConverged : Error {
    IterationTrace trace;
    NotConverged(const std::string& what, IterationTrace t) : Error(what), trace(std::move(t)) {}
};
struct OscillationDetected : Error {
    IterationTrace trace;
    OscillationDetected(const std::string& what, IterationTrace t)
        : Error(what), trace(std::move(t)) {}
};

/** Boundary self-energy V_eff(E) = -(t_h/2) z with z from
 *  core::lead_phase_factor; equals (E - i sqrt(t_h^2 - E^2))/2 on the branch
 *  that continues the outgoing/decaying solution. */
complex effective_potential(complex E, double t_h, LeadKind kind);

/** Dense (2L+1) x (2L+1) effective Hamiltonian at energy E: tridiagonal with
 *  -t_h/2 off the diagonal, the on-site potential inside, and V_eff(E) at the
 *  two boundary sites. Symmetric, not Hermitian. */
EffectiveHamiltonian assemble(const LatticeModel& model, complex E, LeadKind kind);

/** log10 |det(H_eff(E) - E I)| over a rectangular mesh, by LU with partial
 *  pivoting. Exact zeros appear as -inf. Grid-local minima are flagged as
 *  pole candidates. */
DeterminantScan determinant_scan(const LatticeModel& model, const ComplexRectangle& grid,
                                 LeadKind kind = LeadKind::retarded_decaying);

/** All eigenvalues of the dense non-Hermitian matrix (dimension <= 64),
 *  sorted by (Re, Im). */
std::vector<complex> eigenvalues_small(const EffectiveHamiltonian& H);

/** Eigenpairs of the dense matrix; vectors have unit Euclidean norm. */
std::vector<std::pair<complex, Eigen::VectorXcd>> eigenpairs_small(const EffectiveHamiltonian& H);

/** Eigenvector belonging to the eigenvalue closest to lambda, by two rounds
 *  of inverse iteration, normalized so the amplitude at chain site
 *  `normalize_site` equals one. */
Eigen::VectorXcd boundary_eigenvector(const EffectiveHamiltonian& H, complex lambda,
                                      int normalize_site = 0);

/** All roots of the polynomial c[0] + c[1] z + ... + c[n] z^n via the
 *  companion matrix of the monic form, polished by one Newton step each. */
std::vector<complex> polynomial_roots(const std::vector<complex>& coeffs);

/** Self-consistent pole iteration: diagonalize H_eff(E^(q-1)), take the
 *  eigenvalue closest to the postulate, repeat. Converges to a fixed point
 *  E* that is an exact pole of the open chain. beta in (0, 1] mixes the
 *  update for harder models (1 = plain iteration). */
std::pair<ResonantState, IterationTrace> self_consistent_pole(
    const LatticeModel& model, complex E0, double tol = 1e-12, int max_iter = 60,
    LeadKind kind = LeadKind::retarded_decaying, double beta = 1.0);

/** The four exact poles of the chain with V0 on the two sites next to the
 *  origin: the odd bound state z = -1/(2 V0~) and the three roots of the
 *  even-sector cubic 2 V0~ z^3 - z^2 + 2 V0~ z + 1 = 0. */
std::vector<ResonantState> exact_two_site_reference(double V0_over_th);

namespace detail {
/** True if the last postulate revisits an earlier one to within tol while
 *  the residual is still above tol (a cycle of period >= 2). */
bool detect_cycle(const std::vector<complex>& postulates, double tol);
}  // namespace detail

}  // namespace siegert::lattice

#endif
