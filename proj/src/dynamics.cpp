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

#include "siegert/dynamics.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace siegert::dynamics {

void EvolutionConfig::validate() const {
    units.validate();
    if (!(dt > 0.0)) throw Error("dynamics: dt must be positive");
    if (dt > dt_max + 1e-15) throw Error("dynamics: dt exceeds the stability bound");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error("dynamics: bad t_end");
    if (record_every < 1) throw Error("dynamics: record_every must be at least 1");
}

namespace {

/* The evolved vector is the 2L+1 chain amplitudes, with the adatom amplitude
 * appended as the last entry when the model has one. */
struct Generator {
    int half_width = 0;
    std::vector<double> onsite;  // per chain site
    double t_h = 1.0;
    complex v_eff;
    bool has_adatom = false;
    double g = 0.0;
    double E_d = 0.0;
    double hbar = 1.0;

    size_t size() const { return static_cast<size_t>(2 * half_width + 1) + (has_adatom ? 1 : 0); }

    void apply(const std::vector<complex>& in, std::vector<complex>& out) const {
        const size_t n = static_cast<size_t>(2 * half_width + 1);
        const double half_t = 0.5 * t_h;
        for (size_t i = 0; i < n; ++i) {
            complex acc = onsite[i] * in[i];
            if (i > 0) acc -= half_t * in[i - 1];
            if (i + 1 < n) acc -= half_t * in[i + 1];
            out[i] = acc;
        }
        out[0] += v_eff * in[0];
        out[n - 1] += v_eff * in[n - 1];
        if (has_adatom) {
            const size_t origin = static_cast<size_t>(half_width);
            out[origin] += g * in[n];
            out[n] = E_d * in[n] + g * in[origin];
        }
        // Schroedinger right-hand side: dPsi/dt = -(i/hbar) H Psi.
        const complex factor(0.0, -1.0 / hbar);
        for (size_t i = 0; i < in.size(); ++i) out[i] *= factor;
    }
};

void guard_amplitudes(const std::vector<complex>& y, double t) {
    for (const complex& a : y) {
        const double m = std::abs(a);
        if (!std::isfinite(m) || m > EvolutionConfig::amplitude_guard)
            throw UnstableStep("dynamics: amplitude exceeded the overflow guard at t = " +
                               std::to_string(t));
    }
}

WaveField to_field(const std::vector<complex>& y, const Generator& gen, double t) {
    WaveField f;
    f.time = t;
    f.half_width = gen.half_width;
    const size_t n = static_cast<size_t>(2 * gen.half_width + 1);
    f.sites.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    if (gen.has_adatom) f.adatom = y[n];
    return f;
}

std::vector<WaveField> run_rk4(const Generator& gen, std::vector<complex> y,
                               const EvolutionConfig& cfg) {
    std::vector<WaveField> snapshots;
    const double dt = cfg.dt;
    const long long n_whole = static_cast<long long>(std::floor(cfg.t_end / dt + 1e-9));
    const double remainder = cfg.t_end - static_cast<double>(n_whole) * dt;
    const bool has_tail = remainder > 1e-12 * dt;

    std::vector<complex> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    auto step = [&](double h, double t) {
        gen.apply(y, k1);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        gen.apply(tmp, k2);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        gen.apply(tmp, k3);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
        gen.apply(tmp, k4);
        for (size_t i = 0; i < y.size(); ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        guard_amplitudes(y, t + h);
    };

    double t = 0.0;
    guard_amplitudes(y, t);
    snapshots.push_back(to_field(y, gen, t));
    const long long total_steps = n_whole + (has_tail ? 1 : 0);
    for (long long s = 1; s <= total_steps; ++s) {
        const double h = (s <= n_whole) ? dt : remainder;
        step(h, t);
        t = (s <= n_whole) ? static_cast<double>(s) * dt : cfg.t_end;
        if (s % cfg.record_every == 0 || s == total_steps)
            snapshots.push_back(to_field(y, gen, t));
    }
    return snapshots;
}

LeadKind boundary_branch(StateKind kind) {
    return (kind == StateKind::anti_resonant || kind == StateKind::anti_bound)
               ? LeadKind::advanced_growing
               : LeadKind::retarded_decaying;
}

}  // namespace

std::vector<WaveField> evolve(const lattice::LatticeModel& model, const WaveField& init,
                              const ResonantState& state_for_boundary,
                              const EvolutionConfig& cfg) {
    model.validate();
    cfg.validate();
    init.validate();
    if (init.half_width != model.half_width_L)
        throw DimensionMismatch("dynamics: field extent does not match the model");
    if (init.adatom.has_value())
        throw DimensionMismatch("dynamics: field carries an adatom amplitude but the model has none");

    Generator gen;
    gen.half_width = model.half_width_L;
    gen.t_h = model.t_h;
    gen.hbar = cfg.units.hbar;
    gen.onsite.resize(static_cast<size_t>(model.dim()));
    for (int x = -model.half_width_L; x <= model.half_width_L; ++x)
        gen.onsite[static_cast<size_t>(x + model.half_width_L)] = model.onsite_at(x);
    gen.v_eff = cfg.v_eff_override.value_or(lattice::effective_potential(
        state_for_boundary.E.value(), model.t_h, boundary_branch(state_for_boundary.kind)));

    return run_rk4(gen, init.sites, cfg);
}

std::vector<WaveField> evolve(const friedrichs::FriedrichsModel& model, const WaveField& init,
                              const friedrichs::FriedrichsState& state_for_boundary,
                              const EvolutionConfig& cfg) {
    model.validate();
    cfg.validate();
    init.validate();
    if (!init.adatom.has_value())
        throw DimensionMismatch("dynamics: the chain-plus-adatom model needs an adatom amplitude");
    if (init.half_width < 1)
        throw DimensionMismatch("dynamics: the chain part must extend past the origin");

    Generator gen;
    gen.half_width = init.half_width;
    gen.t_h = model.t_h;
    gen.hbar = cfg.units.hbar;
    gen.onsite.assign(static_cast<size_t>(2 * init.half_width + 1), 0.0);
    gen.has_adatom = true;
    gen.g = model.g_tilde * model.t_h;
    gen.E_d = model.Ed_tilde * model.t_h;
    gen.v_eff = cfg.v_eff_override.value_or(lattice::effective_potential(
        state_for_boundary.E.value(), model.t_h, boundary_branch(state_for_boundary.kind)));

    std::vector<complex> y = init.sites;
    y.push_back(*init.adatom);
    return run_rk4(gen, std::move(y), cfg);
}

double eigenstate_phase_check(const std::vector<WaveField>& snapshots, const ComplexEnergy& E,
                              const Units& units) {
    if (snapshots.empty()) throw Error("dynamics: no snapshots to check");
    const WaveField& first = snapshots.front();
    double worst = 0.0;
    for (const WaveField& f : snapshots) {
        if (f.sites.size() != first.sites.size())
            throw DimensionMismatch("dynamics: snapshot sizes differ");
        const complex phase =
            std::exp(complex(0.0, -1.0) * E.value() * (f.time - first.time) / units.hbar);
        for (size_t i = 0; i < f.sites.size(); ++i)
            worst = std::max(worst, std::abs(f.sites[i] - first.sites[i] * phase));
        if (first.adatom.has_value() && f.adatom.has_value())
            worst = std::max(worst, std::abs(*f.adatom - *first.adatom * phase));
    }
    return worst;
}

WindowNormSeries window_norm_series(const std::vector<WaveField>& snapshots, int L_window,
                                    double t_h, const Units& units) {
    if (L_window < 0) throw Error("dynamics: window half-width must be non-negative");
    WindowNormSeries series;
    series.t.reserve(snapshots.size());
    series.N.reserve(snapshots.size());
    series.flux.reserve(snapshots.size());
    for (const WaveField& f : snapshots) {
        if (L_window >= f.half_width)
            throw Error("dynamics: window must end strictly inside the chain");
        double N = 0.0;
        for (int x = -L_window; x <= L_window; ++x) N += std::norm(f.amplitude(x));
        if (f.adatom.has_value()) N += std::norm(*f.adatom);
        // Outward probability current through the two bonds that leave the
        // window: (t_h/hbar) Im[Psi*(W) Psi(W+1)] per side.
        const double right =
            std::imag(std::conj(f.amplitude(L_window)) * f.amplitude(L_window + 1));
        const double left =
            std::imag(std::conj(f.amplitude(-L_window)) * f.amplitude(-L_window - 1));
        series.t.push_back(f.time);
        series.N.push_back(N);
        series.flux.push_back(t_h / units.hbar * (right + left));
    }
    return series;
}

}  // namespace siegert::dynamics
