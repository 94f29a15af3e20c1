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

#include "siegert/friedrichs.hpp"

#include <algorithm>
#include <cmath>

#include "siegert/lattice.hpp"

namespace siegert::friedrichs {

void FriedrichsModel::validate() const {
    if (!(t_h > 0.0) || !std::isfinite(t_h)) throw Error("friedrichs: t_h must be positive");
    if (!(g_tilde >= 0.0) || !std::isfinite(g_tilde))
        throw Error("friedrichs: coupling g~ must be non-negative");
    if (!std::isfinite(Ed_tilde)) throw Error("friedrichs: impurity level must be finite");
}

namespace {

FriedrichsState make_state(complex z, const FriedrichsModel& model) {
    FriedrichsState s;
    s.z = z;
    s.K = ComplexWaveNumber{std::arg(z), std::log(std::abs(z))};
    s.E = ComplexEnergy::from_value(-0.5 * model.t_h * (z + 1.0 / z));
    s.kind = classify_state(s.K, s.E);
    // Adatom row: (E - E_d) F = g B. Undefined ratio in the decoupled g = 0
    // limit, where chain and adatom sectors separate.
    s.B_over_F = (s.E.value() - model.Ed_tilde * model.t_h) / (model.g_tilde * model.t_h);
    return s;
}

}  // namespace

std::array<FriedrichsState, 4> quartic_roots(const FriedrichsModel& model) {
    model.validate();
    const double ed = model.Ed_tilde;
    const double g2 = model.g_tilde * model.g_tilde;
    const std::vector<complex> quartic = {-1.0, -2.0 * ed, 4.0 * g2, 2.0 * ed, 1.0};
    const std::vector<complex> roots = lattice::polynomial_roots(quartic);
    if (roots.size() != 4) throw Error("friedrichs: quartic produced a wrong root count");

    std::array<FriedrichsState, 4> out;
    for (size_t i = 0; i < 4; ++i) out[i] = make_state(roots[i], model);
    std::sort(out.begin(), out.end(), [](const FriedrichsState& a, const FriedrichsState& b) {
        auto rank = [](const FriedrichsState& s) {
            if (std::abs(s.E.gamma()) <= 1e-10) return 0;  // real-energy roots first
            return s.E.half_gamma > 0.0 ? 1 : 2;           // then decaying, then growing
        };
        if (rank(a) != rank(b)) return rank(a) < rank(b);
        if (a.E.epsilon != b.E.epsilon) return a.E.epsilon > b.E.epsilon;
        return std::imag(a.z) > std::imag(b.z);
    });
    return out;
}

double energy_plane_check(const FriedrichsState& state, const FriedrichsModel& model) {
    model.validate();
    const complex E = state.E.value();
    const double Ed = model.Ed_tilde * model.t_h;
    const double g2 = model.g_tilde * model.g_tilde * model.t_h * model.t_h;
    const complex lhs = (E - Ed) * std::sqrt(E * E - model.t_h * model.t_h);
    return std::min(std::abs(lhs - g2), std::abs(lhs + g2));
}

WaveField eigenfunction(const FriedrichsState& state, const FriedrichsModel& model,
                        int x_half_range) {
    model.validate();
    if (x_half_range < 0) throw Error("friedrichs: eigenfunction range must be non-negative");
    WaveField field;
    field.half_width = x_half_range;
    field.sites.resize(static_cast<size_t>(2 * x_half_range + 1));
    const complex B = state.B_over_F;  // F = 1
    for (int x = -x_half_range; x <= x_half_range; ++x)
        field.sites[static_cast<size_t>(x + x_half_range)] =
            B * std::pow(state.z, std::abs(x));
    field.adatom = complex(1.0, 0.0);
    return field;
}

std::vector<SweepPoint> tracked_sweep(double g_tilde, const std::vector<double>& ed_grid,
                                      double t_h) {
    std::vector<SweepPoint> sweep;
    sweep.reserve(ed_grid.size());
    std::array<int, 4> perm = {0, 1, 2, 3};
    for (double ed : ed_grid) {
        FriedrichsModel model;
        model.g_tilde = g_tilde;
        model.Ed_tilde = ed;
        model.t_h = t_h;
        std::array<FriedrichsState, 4> roots = quartic_roots(model);
        if (!sweep.empty()) {
            // Optimal 4x4 assignment against the previous point, by exhaustive
            // minimization of the total z-plane displacement.
            const std::array<FriedrichsState, 4>& prev = sweep.back().roots;
            std::array<int, 4> trial = {0, 1, 2, 3};
            std::array<int, 4> best_perm = trial;
            double best_cost = -1.0;
            do {
                double cost = 0.0;
                for (int i = 0; i < 4; ++i)
                    cost += std::abs(roots[static_cast<size_t>(trial[static_cast<size_t>(i)])].z -
                                     prev[static_cast<size_t>(i)].z);
                if (best_cost < 0.0 || cost < best_cost) {
                    best_cost = cost;
                    best_perm = trial;
                }
            } while (std::next_permutation(trial.begin(), trial.end()));
            perm = best_perm;
        } else {
            perm = {0, 1, 2, 3};
        }
        SweepPoint point;
        point.Ed_tilde = ed;
        for (int i = 0; i < 4; ++i)
            point.roots[static_cast<size_t>(i)] = roots[static_cast<size_t>(perm[static_cast<size_t>(i)])];
        sweep.push_back(std::move(point));
    }
    return sweep;
}

}  // namespace siegert::friedrichs
