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
#include <random>

#include "doctest.h"
#include "siegert/core.hpp"

using namespace siegert;

TEST_CASE("units validate") {
    Units u;
    CHECK_NOTHROW(u.validate());
    u.hbar = 0.0;
    CHECK_THROWS_AS(u.validate(), std::invalid_argument);
    u = Units{};
    u.mass = -1.0;
    CHECK_THROWS_AS(u.validate(), std::invalid_argument);
}

TEST_CASE("wave field layout") {
    WaveField w;
    w.half_width = 2;
    w.sites = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    CHECK_NOTHROW(w.validate());
    CHECK(w.amplitude(-2) == complex(0, 0));
    CHECK(w.amplitude(0) == complex(2, 0));
    CHECK(w.amplitude(2) == complex(4, 0));
    w.sites.pop_back();
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("wave number and energy conventions round trip") {
    const ComplexWaveNumber K{1.5, 0.25};
    CHECK(K.value() == complex(1.5, -0.25));
    const auto K2 = ComplexWaveNumber::from_value(K.value());
    CHECK(K2.k == K.k);
    CHECK(K2.kappa == K.kappa);

    const ComplexEnergy E{2.0, 0.5};
    CHECK(E.gamma() == 1.0);
    CHECK(E.value() == complex(2.0, -0.5));
    const auto E2 = ComplexEnergy::from_value(E.value());
    CHECK(E2.epsilon == E.epsilon);
    CHECK(E2.half_gamma == E.half_gamma);
}

TEST_CASE("continuum dispersion equals the complex square") {
    // Oracle: E = hbar^2 K^2 / (2m) evaluated with complex arithmetic.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    Units u;
    u.hbar = 2.0;
    u.mass = 0.5;
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexWaveNumber K{dist(rng), dist(rng)};
        const complex expected =
            u.hbar * u.hbar / (2.0 * u.mass) * K.value() * K.value();
        const ComplexEnergy E = continuum_dispersion(K, u);
        CHECK(std::abs(E.value() - expected) <= 1e-14 * (1.0 + std::abs(expected)));
        // Decay-rate form of the imaginary part.
        CHECK(E.gamma() ==
              doctest::Approx(2.0 * u.hbar * u.hbar * K.k * K.kappa / u.mass).epsilon(1e-14));
    }
}

TEST_CASE("lattice dispersion equals the complex cosine") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Units u;
    u.hopping_th = 1.3;
    u.lattice_dx = 0.7;
    for (int trial = 0; trial < 100; ++trial) {
        const ComplexWaveNumber K{dist(rng), dist(rng)};
        const complex expected = -u.hopping_th * std::cos(K.value() * u.lattice_dx);
        CHECK(std::abs(lattice_dispersion(K, u).value() - expected) <=
              1e-14 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("lead phase factor solves z + 1/z = -2E/t_h on both branches") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(-2.5, 2.5);
    const double t_h = 1.0;
    for (int trial = 0; trial < 400; ++trial) {
        const complex E(dist(rng), dist(rng));
        const complex zr = lead_phase_factor(E, t_h, LeadKind::retarded_decaying);
        const complex za = lead_phase_factor(E, t_h, LeadKind::advanced_growing);
        for (const complex z : {zr, za}) {
            const complex residual = z + 1.0 / z + 2.0 * E / t_h;
            CHECK(std::abs(residual) <= 1e-12 * (1.0 + std::abs(E)));
        }
        CHECK(std::abs(zr * za - 1.0) <= 1e-12);
        if (E.imag() != 0.0) CHECK(zr.imag() >= za.imag());
    }
}

TEST_CASE("lead phase factor outside the real band decays for both kinds") {
    for (const double e : {1.0, 1.5, 4.0, -1.2, -10.0}) {
        const complex zr = lead_phase_factor(complex(e, 0.0), 1.0, LeadKind::retarded_decaying);
        const complex za = lead_phase_factor(complex(e, 0.0), 1.0, LeadKind::advanced_growing);
        CHECK(zr == za);
        CHECK(std::abs(zr) <= 1.0 + 1e-14);
    }
}

TEST_CASE("lattice wavenumber inverts the phase factor") {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> dist(-1.8, 1.8);
    Units u;
    u.lattice_dx = 0.5;
    u.hopping_th = 2.0;
    for (int trial = 0; trial < 200; ++trial) {
        const complex Ev(dist(rng), dist(rng));
        for (const LeadKind kind : {LeadKind::retarded_decaying, LeadKind::advanced_growing}) {
            const complex z = lead_phase_factor(Ev, u.hopping_th, kind);
            const ComplexWaveNumber K = lattice_wavenumber(ComplexEnergy::from_value(Ev), u, kind);
            const complex z_back = std::exp(complex(0.0, 1.0) * K.value() * u.lattice_dx);
            CHECK(std::abs(z_back - z) <= 1e-12 * (1.0 + std::abs(z)));
            // The energy is reproduced through the dispersion relation.
            CHECK(std::abs(lattice_dispersion(K, u).value() - Ev) <=
                  1e-12 * (1.0 + std::abs(Ev)));
        }
    }
}

TEST_CASE("state classification quadrants") {
    const ComplexEnergy real_E{1.0, 0.0};
    CHECK(classify_state(ComplexWaveNumber{0.0, -1.0}, real_E) == StateKind::bound);
    CHECK(classify_state(ComplexWaveNumber{0.0, 1.0}, real_E) == StateKind::anti_bound);
    CHECK(classify_state(ComplexWaveNumber{1.0, 0.5}, ComplexEnergy{0.75, 0.5}) ==
          StateKind::resonant);
    CHECK(classify_state(ComplexWaveNumber{-1.0, 0.5}, ComplexEnergy{0.75, -0.5}) ==
          StateKind::anti_resonant);
    // A residual imaginary part below the tolerance still counts as bound.
    CHECK(classify_state(ComplexWaveNumber{0.0, -1.0}, ComplexEnergy{1.0, 4e-11}) ==
          StateKind::bound);
    CHECK(classify_state(ComplexWaveNumber{0.0, -1.0}, ComplexEnergy{1.0, 4e-11}, 1e-12) ==
          StateKind::resonant);
}
