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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "siegert/dynamics.hpp"

using namespace siegert;
using dynamics::EvolutionConfig;

namespace {

friedrichs::FriedrichsModel adatom_model() { return friedrichs::FriedrichsModel{}; }

friedrichs::FriedrichsState adatom_root(size_t index) {
    return friedrichs::quartic_roots(adatom_model())[index];
}

double max_amplitude(const WaveField& f) {
    double m = f.adatom ? std::abs(*f.adatom) : 0.0;
    for (const complex& a : f.sites) m = std::max(m, std::abs(a));
    return m;
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
    REQUIRE(t.size() == y.size());
    REQUIRE(t.size() >= 3);
    double tm = 0.0, ym = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= static_cast<double>(t.size());
    ym /= static_cast<double>(t.size());
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        num += (t[i] - tm) * (y[i] - ym);
        den += (t[i] - tm) * (t[i] - tm);
    }
    return num / den;
}

WaveField random_field(int half_width, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    WaveField f;
    f.half_width = half_width;
    f.sites.resize(static_cast<size_t>(2 * half_width + 1));
    for (complex& a : f.sites) a = complex(dist(rng), dist(rng));
    return f;
}

}  // namespace

TEST_CASE("config validation") {
    EvolutionConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EvolutionConfig{};
    cfg.dt = 0.2;  // above the stability bound
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EvolutionConfig{};
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EvolutionConfig{};
    cfg.record_every = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = EvolutionConfig{};
    cfg.units.hbar = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("snapshot schedule") {
    lattice::LatticeModel model;
    model.half_width_L = 3;
    EvolutionConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    cfg.record_every = 3;
    cfg.v_eff_override = complex(0.0, 0.0);
    const auto snaps = dynamics::evolve(model, random_field(3, 5), ResonantState{}, cfg);
    // Initial field, records every 3rd of the 20 steps, and the final step.
    CHECK(snaps.size() == 8);
    CHECK(snaps.front().time == 0.0);
    CHECK(snaps.back().time == doctest::Approx(1.0).epsilon(1e-12));
    for (size_t i = 1; i < snaps.size(); ++i) CHECK(snaps[i].time > snaps[i - 1].time);
}

TEST_CASE("bound eigenstate stays stationary") {
    const auto m = adatom_model();
    const auto bound = adatom_root(0);
    WaveField init = friedrichs::eigenfunction(bound, m, 25);

    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 5.0;
    cfg.record_every = 50;
    const auto snaps = dynamics::evolve(m, init, bound, cfg);
    const double drift = dynamics::eigenstate_phase_check(snaps, bound.E);
    CHECK(drift <= 1e-8 * max_amplitude(init));

    // The norm is conserved along the run for a real-energy state.
    const auto series = dynamics::window_norm_series(snaps, 10, m.t_h);
    for (const double N : series.N)
        CHECK(N == doctest::Approx(series.N.front()).epsilon(1e-8));
}

TEST_CASE("resonant eigenstate decays at Gamma over hbar") {
    const auto m = adatom_model();
    const auto res = adatom_root(2);
    REQUIRE(res.kind == StateKind::resonant);
    WaveField init = friedrichs::eigenfunction(res, m, 30);

    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 8.0;
    cfg.record_every = 100;
    const auto snaps = dynamics::evolve(m, init, res, cfg);

    std::vector<double> t, log_density;
    for (const auto& f : snaps) {
        t.push_back(f.time);
        log_density.push_back(std::log(std::norm(f.amplitude(3))));
    }
    const double slope = fit_slope(t, log_density);
    const double expected = -res.E.gamma();  // hbar = 1
    CHECK(std::abs(slope - expected) <= 0.01 * std::abs(expected));

    // The integrator reproduces the full complex phase, not only the modulus.
    CHECK(dynamics::eigenstate_phase_check(snaps, res.E) <= 1e-7 * max_amplitude(init));
}

TEST_CASE("evolution is linear") {
    lattice::LatticeModel model;
    model.half_width_L = 10;
    model.onsite = {{-1, 1.0}, {1, 1.0}};
    EvolutionConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.5;
    cfg.v_eff_override = complex(0.1, -0.2);

    const WaveField base = random_field(10, 17);
    WaveField doubled = base;
    for (complex& a : doubled.sites) a *= 2.0;
    WaveField scaled = base;
    for (complex& a : scaled.sites) a *= 0.37;

    const auto s1 = dynamics::evolve(model, base, ResonantState{}, cfg);
    const auto s2 = dynamics::evolve(model, doubled, ResonantState{}, cfg);
    const auto s3 = dynamics::evolve(model, scaled, ResonantState{}, cfg);
    REQUIRE(s1.size() == s2.size());
    REQUIRE(s1.size() == s3.size());
    for (size_t i = 0; i < s1.size(); ++i) {
        for (size_t j = 0; j < s1[i].sites.size(); ++j) {
            // Doubling is a pure exponent shift, so it commutes with rounding.
            CHECK(s2[i].sites[j] == 2.0 * s1[i].sites[j]);
            CHECK(std::abs(s3[i].sites[j] - 0.37 * s1[i].sites[j]) <=
                  1e-13 * std::abs(s1[i].sites[j]) + 1e-18);
        }
    }
}

TEST_CASE("integrator error shrinks at fourth order") {
    const auto m = adatom_model();
    const auto res = adatom_root(2);
    const WaveField init = friedrichs::eigenfunction(res, m, 15);

    auto error_at = [&](double dt) {
        EvolutionConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 2.0;
        cfg.record_every = 1000000;  // initial and final snapshot only
        const auto snaps = dynamics::evolve(m, init, res, cfg);
        return dynamics::eigenstate_phase_check(snaps, res.E);
    };
    const double e1 = error_at(0.04);
    const double e2 = error_at(0.02);
    const double e3 = error_at(0.01);
    REQUIRE(e3 > 0.0);
    CHECK(e1 / e2 > 11.2);
    CHECK(e1 / e2 < 20.8);
    CHECK(e2 / e3 > 11.2);
    CHECK(e2 / e3 < 20.8);
}

TEST_CASE("window norm balances the boundary flux") {
    const auto m = adatom_model();
    const auto res = adatom_root(2);
    const WaveField init = friedrichs::eigenfunction(res, m, 25);

    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 6.0;
    cfg.record_every = 10;
    const auto snaps = dynamics::evolve(m, init, res, cfg);
    const auto series = dynamics::window_norm_series(snaps, 10, m.t_h);
    REQUIRE(series.t.size() == snaps.size());

    for (size_t i = 1; i + 1 < series.t.size(); ++i) {
        const double dN =
            (series.N[i + 1] - series.N[i - 1]) / (series.t[i + 1] - series.t[i - 1]);
        CHECK(std::abs(dN + series.flux[i]) <= 1e-4 * std::abs(series.flux[i]) + 1e-12);
    }

    CHECK_THROWS_AS(dynamics::window_norm_series(snaps, 25, m.t_h), Error);
    CHECK_THROWS_AS(dynamics::window_norm_series(snaps, -1, m.t_h), Error);
    CHECK_THROWS_AS(dynamics::eigenstate_phase_check({}, res.E), Error);
}

TEST_CASE("dimension mismatches are rejected") {
    lattice::LatticeModel model;
    model.half_width_L = 2;
    EvolutionConfig cfg;
    cfg.t_end = 0.1;
    cfg.v_eff_override = complex(0.0, 0.0);

    CHECK_THROWS_AS(dynamics::evolve(model, random_field(3, 2), ResonantState{}, cfg),
                    dynamics::DimensionMismatch);

    WaveField with_adatom = random_field(2, 3);
    with_adatom.adatom = complex(1.0, 0.0);
    CHECK_THROWS_AS(dynamics::evolve(model, with_adatom, ResonantState{}, cfg),
                    dynamics::DimensionMismatch);

    const auto fm = adatom_model();
    const auto root = adatom_root(0);
    CHECK_THROWS_AS(dynamics::evolve(fm, random_field(4, 4), root, cfg),
                    dynamics::DimensionMismatch);

    WaveField point;  // adatom present but no chain to couple to
    point.half_width = 0;
    point.sites = {complex(1.0, 0.0)};
    point.adatom = complex(1.0, 0.0);
    CHECK_THROWS_AS(dynamics::evolve(fm, point, root, cfg), dynamics::DimensionMismatch);

    WaveField broken = random_field(2, 6);
    broken.sites.pop_back();
    CHECK_THROWS_AS(dynamics::evolve(model, broken, ResonantState{}, cfg),
                    std::invalid_argument);
}

TEST_CASE("amplitude guard") {
    lattice::LatticeModel model;
    model.half_width_L = 3;
    EvolutionConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 40.0;

    SUBCASE("non-finite input") {
        WaveField bad = random_field(3, 8);
        bad.sites[0] = complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
        cfg.v_eff_override = complex(0.0, 0.0);
        CHECK_THROWS_AS(dynamics::evolve(model, bad, ResonantState{}, cfg),
                        dynamics::UnstableStep);
    }

    SUBCASE("runaway growth") {
        // A gaining boundary term amplifies the field past the overflow guard.
        WaveField huge = random_field(3, 9);
        for (complex& a : huge.sites) a *= 1e97;
        cfg.v_eff_override = complex(0.0, 2.0);
        CHECK_THROWS_AS(dynamics::evolve(model, huge, ResonantState{}, cfg),
                        dynamics::UnstableStep);
    }
}
