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

/** @file cli.cpp
 *  @brief Subcommand front end. Every leaf subcommand resolves an output
 *    directory, writes a manifest that reproduces the run via --config, and
 *    then emits its CSV files. Exit codes: 0 ok, 2 bad configuration,
 *    3 numerical non-convergence.
 */

#include "siegert/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "siegert/core.hpp"
#include "siegert/csv.hpp"
#include "siegert/delta_well.hpp"
#include "siegert/dynamics.hpp"
#include "siegert/flux.hpp"
#include "siegert/friedrichs.hpp"
#include "siegert/jost.hpp"
#include "siegert/lattice.hpp"

namespace siegert::cli {
namespace {

namespace fs = std::filesystem;

const char* kind_name(StateKind kind) {
    switch (kind) {
        case StateKind::bound: return "bound";
        case StateKind::anti_bound: return "anti_bound";
        case StateKind::resonant: return "resonant";
        case StateKind::anti_resonant: return "anti_resonant";
    }
    return "unknown";
}

const char* parity_name(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        case Parity::none: return "none";
    }
    return "unknown";
}

LeadKind parse_kind(const std::string& name) {
    return name == "advanced" ? LeadKind::advanced_growing : LeadKind::retarded_decaying;
}

Parity parse_parity(const std::string& name) {
    if (name == "even") return Parity::even;
    if (name == "odd") return Parity::odd;
    throw Error("unknown parity '" + name + "'");
}

/** "re,im" (or a plain real number) to a complex value. */
complex parse_complex(const std::string& text) {
    try {
        const auto comma = text.find(',');
        std::size_t used = 0;
        if (comma == std::string::npos) {
            const double re = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return complex(re, 0.0);
        }
        const std::string re_part = text.substr(0, comma);
        const std::string im_part = text.substr(comma + 1);
        const double re = std::stod(re_part, &used);
        if (used != re_part.size()) throw std::invalid_argument(text);
        const double im = std::stod(im_part, &used);
        if (used != im_part.size()) throw std::invalid_argument(text);
        return complex(re, im);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error("cannot parse '" + text + "' as a complex number; expected re,im");
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw Error("grid needs at least one point");
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

/** Output directory, honoring the SIEGERT_OUT_ROOT override for relative
 *  paths. */
fs::path resolve_out(const std::string& dir) {
    fs::path p(dir);
    const char* root = std::getenv("SIEGERT_OUT_ROOT");
    if (root != nullptr && *root != '\0' && p.is_relative()) return fs::path(root) / p;
    return p;
}

/* ------------------------------------------------------------------ */
/* model files                                                         */

struct ModelFile {
    std::string type = "lattice";
    std::map<std::string, double> scalars;
    std::map<int, double> sites;
};

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return std::isspace(c) == 0; };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

double parse_double(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error("bad number '" + text + "' in " + where);
    }
}

/** key = value lines with '#' comments; site entries as `site <i> = <v>`. */
ModelFile read_model_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path.string());
    static const std::vector<std::string> known = {"half_width", "L",  "t_h",       "g",
                                                   "ed",         "v0", "half_width_L"};
    ModelFile mf;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("expected key = value at " + where);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "type") {
            mf.type = value;
            continue;
        }
        if (key.rfind("site", 0) == 0 && key.size() > 4) {
            const std::string idx = trim(key.substr(4));
            try {
                std::size_t used = 0;
                const int site = std::stoi(idx, &used);
                if (used != idx.size()) throw std::invalid_argument(idx);
                mf.sites[site] = parse_double(value, where);
            } catch (const Error&) {
                throw;
            } catch (const std::exception&) {
                throw Error("bad site index '" + idx + "' at " + where);
            }
            continue;
        }
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error("unknown key '" + key + "' at " + where);
        mf.scalars[key] = parse_double(value, where);
    }
    return mf;
}

lattice::LatticeModel two_site_model(double v0, double t_h, int half_width = 2) {
    lattice::LatticeModel m;
    m.half_width_L = half_width;
    m.t_h = t_h;
    m.onsite = {{-1, v0}, {1, v0}};
    m.validate();
    return m;
}

lattice::LatticeModel lattice_from_file(const ModelFile& mf) {
    if (mf.type != "lattice")
        throw Error("model file has type '" + mf.type + "', expected lattice");
    lattice::LatticeModel m;
    for (const auto& [key, value] : mf.scalars) {
        if (key == "half_width" || key == "L" || key == "half_width_L")
            m.half_width_L = static_cast<int>(std::lround(value));
        else if (key == "t_h")
            m.t_h = value;
        else
            throw Error("key '" + key + "' does not apply to a lattice model");
    }
    m.onsite = mf.sites;
    m.validate();
    return m;
}

/* ------------------------------------------------------------------ */
/* options                                                             */

struct Opts {
    std::string out = "out";
    int threads = 0;
    unsigned long seed = 0;

    // delta-well roots
    double dwr_a = 1.0;
    std::string dwr_parity = "both";
    double dwr_xi_min = 0.0, dwr_xi_max = 6.5;
    double dwr_tol = 1e-13;
    bool dwr_mirrors = false;
    bool dwr_json = false;
    // delta-well curves
    double dwc_a = 1.0;
    double dwc_xi_min = 0.01, dwc_xi_max = 8.0;
    int dwc_n = 800;
    // delta-well transmission
    double dwt_a = 1.0;
    double dwt_k_min = 0.02, dwt_k_max = 6.5;
    int dwt_n = 800;

    // flux report
    double fr_a = 1.0;
    std::string fr_parity = "even";
    int fr_index = 0;
    double fr_L = 2.0;
    std::string fr_psi_file;
    // flux expanding
    double fe_a = 1.0;
    std::string fe_parity = "even";
    int fe_index = 0;
    double fe_t_min = 1.0, fe_t_max = 10.0;
    int fe_n = 100;
    std::optional<double> fe_fixed_L;
    bool fe_pure_tail = false;

    // lattice
    std::string ls_preset = "two-site";
    double ls_v0 = 1.0;
    double ls_t_h = 1.0;
    std::string ls_model_file;
    double ls_re_min = -0.5, ls_re_max = -0.2;
    int ls_n_re = 200;
    double ls_im_min = -0.2, ls_im_max = 0.0;
    int ls_n_im = 200;
    std::string ls_kind = "retarded";

    std::string lv_preset = "two-site";
    double lv_v0 = 1.0;
    double lv_t_h = 1.0;
    std::string lv_model_file;
    std::string lv_e0;
    double lv_tol = 1e-12;
    int lv_max_iter = 60;
    double lv_beta = 1.0;
    std::string lv_kind = "retarded";

    double lx_v0 = 1.0;

    // friedrichs
    double frr_g = 0.1, frr_ed = -0.5, frr_t_h = 1.0;
    double frs_g = 0.1, frs_ed_min = -2.0, frs_ed_max = 2.0, frs_t_h = 1.0;
    int frs_n = 401;
    double fre_g = 0.1, fre_ed = -0.5, fre_t_h = 1.0;
    std::string fre_root = "c";
    int fre_half_width = 20;

    // dynamics
    std::string dy_model_file;
    std::string dy_preset = "friedrichs";
    double dy_g = 0.1, dy_ed = -0.5, dy_t_h = 1.0, dy_v0 = 1.0;
    std::string dy_state = "c";
    std::string dy_e0;
    std::string dy_kind = "retarded";
    int dy_half_width = 200;
    double dy_dt = 0.05, dy_t_end = 60.0;
    int dy_record_every = 20;
    int dy_probe = 1;

    // jost
    std::string jp_potential = "exponential";
    double jp_v0 = 2.0;
    double jp_range = 1.0;
    double jp_smooth_width = 0.0;
    double jp_r_min = 0.0, jp_r_max = 0.0;

    int js_l_max = 0;
    double js_k_min = 0.1, js_k_max = 3.0;
    int js_n = 60;

    int jo_l = 0;
    double jo_re_min = -0.1, jo_re_max = 0.1;
    int jo_n_re = 21;
    double jo_im_min = 0.05, jo_im_max = 2.0;
    int jo_n_im = 40;

    int jx_l_max = 3;
    double jx_k = 1.0;
    int jx_n_theta = 181;

    std::string fig_id;

    void (*selected)(const Opts&, const fs::path&) = nullptr;
};

/* ------------------------------------------------------------------ */
/* shared writers                                                      */

void write_parity_curves(const fs::path& file, const delta_well::DoubleDeltaModel& model,
                         double xi_min, double xi_max, int n) {
    const auto samples = delta_well::parity_curves(model, linspace(xi_min, xi_max, n));
    csv::CsvWriter out(file);
    out.comment("double-delta root curves, a/l = " + csv::format(model.a_over_l));
    out.comment("units: xi = k l, eta = kappa l (dimensionless)");
    out.comment("eta_line: eta = l/(2a) + xi/tan(2 xi)");
    out.comment("eta_circle_*: eta >= 0 roots of e^{4 eta} = (1 - 2a eta/l)^2 + (2a xi/l)^2");
    out.header({"xi", "eta_line", "eta_circle_0", "eta_circle_1", "eta_circle_2"});
    for (const auto& s : samples) {
        std::vector<std::string> cells = {csv::format(s.xi), csv::format(s.eta_fixed_point)};
        for (size_t j = 0; j < 3; ++j)
            cells.push_back(j < s.eta_circle.size() ? csv::format(s.eta_circle[j]) : "nan");
        out.raw_row(cells);
    }
}

void write_transmission(const fs::path& file, const delta_well::DoubleDeltaModel& model,
                        double k_min, double k_max, int n) {
    const auto scan = delta_well::transmission_scan(model, linspace(k_min, k_max, n));
    csv::CsvWriter out(file);
    out.comment("double-delta transmission probability, a/l = " + csv::format(model.a_over_l));
    out.comment("units: k in 1/l, T dimensionless");
    out.header({"k_l", "T"});
    for (const auto& [k, T] : scan) out.row({k, T});
}

void write_sweep(const fs::path& file, double g, double ed_min, double ed_max, int n,
                 double t_h) {
    const auto points = friedrichs::tracked_sweep(g, linspace(ed_min, ed_max, n), t_h);
    csv::CsvWriter out(file);
    out.comment("Friedrichs chain roots vs adatom level, g/t_h = " + csv::format(g));
    out.comment("units: E in t_h, K in 1/dx; root_id follows each branch by continuity");
    out.header({"Ed", "root_id", "ReK", "ImK", "ReE", "ImE", "kind"});
    for (const auto& p : points) {
        for (int i = 0; i < 4; ++i) {
            const auto& st = p.roots[static_cast<size_t>(i)];
            out.raw_row({csv::format(p.Ed_tilde), std::string(1, static_cast<char>('a' + i)),
                         csv::format(st.K.k), csv::format(st.K.kappa), csv::format(st.E.epsilon),
                         csv::format(-st.E.half_gamma), kind_name(st.kind)});
        }
    }
}

void write_scan(const fs::path& grid_file, const fs::path& minima_file,
                const lattice::LatticeModel& model, const lattice::ComplexRectangle& rect,
                LeadKind kind) {
    const auto scan = lattice::determinant_scan(model, rect, kind);
    {
        csv::CsvWriter out(grid_file);
        out.comment("log10 |det(H_eff(E) - E)| over the energy rectangle");
        out.comment("units: E in t_h");
        out.header({"ReE", "ImE", "logD"});
        for (size_t i_im = 0; i_im < scan.im_grid.size(); ++i_im)
            for (size_t i_re = 0; i_re < scan.re_grid.size(); ++i_re)
                out.row({scan.re_grid[i_re], scan.im_grid[i_im],
                         scan.at(static_cast<int>(i_re), static_cast<int>(i_im))});
    }
    {
        csv::CsvWriter out(minima_file);
        out.comment("grid-local minima of log10 |det|, deepest first (pole candidates)");
        out.header({"ReE", "ImE"});
        for (const auto& m : scan.minima) out.row({m.real(), m.imag()});
    }
}

void write_trace(const fs::path& file, const lattice::IterationTrace& trace) {
    csv::CsvWriter out(file);
    out.comment("self-consistent pole iteration trace");
    out.comment("units: E in t_h");
    out.header({"q", "ReE", "ImE", "residual"});
    for (size_t q = 0; q < trace.postulates.size(); ++q) {
        const complex e = trace.postulates[q];
        out.raw_row({csv::format(static_cast<double>(q)), csv::format(e.real()),
                     csv::format(e.imag()),
                     q == 0 ? std::string("nan") : csv::format(trace.residuals[q - 1])});
    }
}

void write_frame(const fs::path& file, const WaveField& w, int keep_half_width) {
    csv::CsvWriter out(file);
    out.comment("t = " + csv::format(w.time));
    if (w.adatom.has_value())
        out.comment("adatom: " + csv::format(w.adatom->real()) + ", " +
                    csv::format(w.adatom->imag()) + ", " + csv::format(std::abs(*w.adatom)));
    out.header({"x", "re_psi", "im_psi", "abs_psi"});
    const int hw = keep_half_width < 0 ? w.half_width : std::min(keep_half_width, w.half_width);
    for (int x = -hw; x <= hw; ++x) {
        const complex v = w.amplitude(x);
        out.row({static_cast<double>(x), v.real(), v.imag(), std::abs(v)});
    }
}

int friedrichs_root_index(const std::string& label) {
    if (label.size() == 1 && label[0] >= 'a' && label[0] <= 'd') return label[0] - 'a';
    throw Error("unknown root label '" + label + "'; expected a, b, c or d");
}

jost::RadialProblem make_radial_problem(const Opts& o, int l) {
    jost::RadialProblem prob;
    prob.l = l;
    prob.range_scale = o.jp_range;
    prob.r_max = o.jp_r_max > 0 ? o.jp_r_max : 40.0 * o.jp_range;
    prob.r_min = o.jp_r_min > 0 ? o.jp_r_min : 1e-4 * o.jp_range;
    const double v0 = o.jp_v0;
    const double range = o.jp_range;
    if (o.jp_potential == "exponential") {
        prob.V = [v0, range](double r) { return -v0 * std::exp(-r / range); };
    } else if (o.jp_potential == "square-well") {
        const double w = o.jp_smooth_width > 0 ? o.jp_smooth_width : range / 5000.0;
        prob.V = [v0, range, w](double r) {
            return -v0 * 0.5 * (1.0 - std::tanh((r - range) / w));
        };
        prob.sharp_features.push_back({range, w});
    } else {
        throw Error("unknown potential '" + o.jp_potential + "'");
    }
    return prob;
}

/* ------------------------------------------------------------------ */
/* delta-well actions                                                  */

void run_dw_roots(const Opts& o, const fs::path& out) {
    delta_well::DoubleDeltaModel model;
    model.a_over_l = o.dwr_a;
    model.validate();
    std::vector<Parity> parities;
    if (o.dwr_parity == "both")
        parities = {Parity::even, Parity::odd};
    else
        parities = {parse_parity(o.dwr_parity)};

    csv::CsvWriter w(out / "roots.csv");
    w.comment("double-delta Siegert roots, a/l = " + csv::format(model.a_over_l));
    w.comment("units: K in 1/l, E in hbar^2/(m l^2)");
    w.header({"parity", "re_K_l", "im_K_l", "re_E", "im_E", "kind", "residual"});
    nlohmann::json jroots = nlohmann::json::array();
    for (const Parity p : parities) {
        delta_well::RootSearchDiagnostics diag;
        const auto roots = delta_well::siegert_roots(model, p, o.dwr_xi_min, o.dwr_xi_max,
                                                     o.dwr_tol, o.dwr_mirrors, &diag);
        w.comment(std::string(parity_name(p)) + ": failed_seeds = " +
                  std::to_string(diag.failed_seeds) +
                  (diag.closed_branch ? ", modulus curve split" : ""));
        for (const auto& st : roots) {
            const complex K = st.K.value();
            const complex E = st.E.value();
            w.raw_row({parity_name(st.parity), csv::format(K.real()), csv::format(K.imag()),
                       csv::format(E.real()), csv::format(E.imag()), kind_name(st.kind),
                       csv::format(st.residual)});
            jroots.push_back({{"parity", parity_name(st.parity)},
                              {"K", {{"re", K.real()}, {"im", K.imag()}}},
                              {"E", {{"re", E.real()}, {"im", E.imag()}}},
                              {"kind", kind_name(st.kind)},
                              {"residual", st.residual}});
        }
    }
    if (o.dwr_json) {
        std::ofstream jf(out / "roots.json", std::ios::binary);
        if (!jf) throw Error("cannot write " + (out / "roots.json").string());
        jf << jroots.dump(2) << '\n';
    }
}

void run_dw_curves(const Opts& o, const fs::path& out) {
    delta_well::DoubleDeltaModel model;
    model.a_over_l = o.dwc_a;
    model.validate();
    write_parity_curves(out / "curves.csv", model, o.dwc_xi_min, o.dwc_xi_max, o.dwc_n);
}

void run_dw_transmission(const Opts& o, const fs::path& out) {
    delta_well::DoubleDeltaModel model;
    model.a_over_l = o.dwt_a;
    model.validate();
    write_transmission(out / "transmission.csv", model, o.dwt_k_min, o.dwt_k_max, o.dwt_n);
}

/* ------------------------------------------------------------------ */
/* flux actions                                                        */

ResonantState pick_root(double a_over_l, Parity parity, int index,
                        delta_well::DoubleDeltaModel* model_out) {
    delta_well::DoubleDeltaModel model;
    model.a_over_l = a_over_l;
    model.validate();
    const auto roots = delta_well::siegert_roots(model, parity, 0.0, 6.5, 1e-13);
    if (index < 0 || static_cast<size_t>(index) >= roots.size())
        throw Error("root index " + std::to_string(index) + " out of range; found " +
                    std::to_string(roots.size()) + " roots");
    if (model_out != nullptr) *model_out = model;
    return roots[static_cast<size_t>(index)];
}

/** Three leading numeric columns x, re, im of a frame file. */
flux::SampledWaveFunction read_psi_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open wave function file " + path.string());
    std::vector<double> grid;
    std::vector<complex> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> cols;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',') && cols.size() < 3)
            cols.push_back(parse_double(trim(cell), path.string() + ":" + std::to_string(lineno)));
        if (cols.size() < 3)
            throw Error("need columns x, re_psi, im_psi at " + path.string() + ":" +
                        std::to_string(lineno));
        grid.push_back(cols[0]);
        values.emplace_back(cols[1], cols[2]);
    }
    if (grid.size() < 5) throw Error("wave function file " + path.string() + " is too short");
    flux::SampledWaveFunction psi;
    psi.grid = std::move(grid);
    psi.values = std::move(values);
    psi.dx = psi.grid[1] - psi.grid[0];
    psi.validate();
    return psi;
}

void run_flux_report(const Opts& o, const fs::path& out) {
    if (!o.fr_psi_file.empty()) {
        const auto psi = read_psi_csv(o.fr_psi_file);
        const auto rep = flux::boundary_flux(psi, o.fr_L, Units{});
        csv::CsvWriter w(out / "report.csv");
        w.comment("segment identity Im<H> = -(hbar/2m) Re<p_n> on a sampled wave function");
        w.comment("units: hbar = m = 1");
        w.header({"L", "re_energy", "im_energy", "boundary_flux", "imbalance"});
        w.row({rep.L, rep.energy_expectation.real(), rep.energy_expectation.imag(),
               rep.boundary_flux, rep.imbalance});
        return;
    }
    delta_well::DoubleDeltaModel model;
    const auto st = pick_root(o.fr_a, parse_parity(o.fr_parity), o.fr_index, &model);
    const auto rep = flux::gamma_flux_identity(st, model, o.fr_L);
    const Units u;
    const double gamma_dispersion = continuum_dispersion(st.K, u).gamma();
    csv::CsvWriter w(out / "report.csv");
    w.comment("decay-rate flux identity for one Siegert root, a/l = " +
              csv::format(model.a_over_l));
    w.comment("units: K in 1/l, E in hbar^2/(m l^2)");
    w.header({"re_K_l", "im_K_l", "gamma", "identity_lhs", "identity_rhs", "relative_gap",
              "dispersion_gap", "regularized_norm"});
    w.row({st.K.k, -st.K.kappa, st.E.gamma(), rep.lhs, rep.rhs, rep.relative_gap,
           std::abs(st.E.gamma() - gamma_dispersion), flux::regularized_norm(st)});
}

void run_flux_expanding(const Opts& o, const fs::path& out) {
    delta_well::DoubleDeltaModel model;
    const auto st = pick_root(o.fe_a, parse_parity(o.fe_parity), o.fe_index, &model);
    flux::ExpandingVolumeOptions opt;
    opt.fixed_L = o.fe_fixed_L;
    opt.model = o.fe_pure_tail ? nullptr : &model;
    const auto series =
        flux::expanding_volume_number(st, linspace(o.fe_t_min, o.fe_t_max, o.fe_n), opt);
    csv::CsvWriter w(out / "expanding.csv");
    w.comment("decay-compensated particle number in the window |x| < L(t)");
    w.comment("units: t in m l^2 / hbar");
    double lo = series.front().second, hi = lo;
    for (const auto& [t, N] : series) {
        lo = std::min(lo, N);
        hi = std::max(hi, N);
    }
    w.comment("relative spread = " +
              csv::format(std::abs(series.front().second) > 0
                              ? (hi - lo) / std::abs(series.front().second)
                              : hi - lo));
    w.header({"t", "N"});
    for (const auto& [t, N] : series) w.row({t, N});
}

/* ------------------------------------------------------------------ */
/* lattice actions                                                     */

lattice::LatticeModel scan_model(const Opts& o) {
    if (!o.ls_model_file.empty()) return lattice_from_file(read_model_file(o.ls_model_file));
    if (o.ls_preset != "two-site") throw Error("unknown preset '" + o.ls_preset + "'");
    return two_site_model(o.ls_v0 * o.ls_t_h, o.ls_t_h);
}

lattice::LatticeModel solve_model(const Opts& o) {
    if (!o.lv_model_file.empty()) return lattice_from_file(read_model_file(o.lv_model_file));
    if (o.lv_preset != "two-site") throw Error("unknown preset '" + o.lv_preset + "'");
    return two_site_model(o.lv_v0 * o.lv_t_h, o.lv_t_h);
}

void run_lattice_scan(const Opts& o, const fs::path& out) {
    lattice::ComplexRectangle rect;
    rect.re_min = o.ls_re_min;
    rect.re_max = o.ls_re_max;
    rect.n_re = o.ls_n_re;
    rect.im_min = o.ls_im_min;
    rect.im_max = o.ls_im_max;
    rect.n_im = o.ls_n_im;
    write_scan(out / "scan.csv", out / "minima.csv", scan_model(o), rect, parse_kind(o.ls_kind));
}

void run_lattice_solve(const Opts& o, const fs::path& out) {
    if (o.lv_e0.empty()) throw Error("lattice solve needs --e0 re,im");
    const complex e0 = parse_complex(o.lv_e0);
    const auto model = solve_model(o);
    const LeadKind kind = parse_kind(o.lv_kind);
    std::pair<ResonantState, lattice::IterationTrace> result;
    try {
        result = lattice::self_consistent_pole(model, e0, o.lv_tol, o.lv_max_iter, kind,
                                               o.lv_beta);
    } catch (const lattice::NotConverged& e) {
        write_trace(out / "trace.csv", e.trace);
        throw;
    } catch (const lattice::OscillationDetected& e) {
        write_trace(out / "trace.csv", e.trace);
        throw;
    }
    const auto& [st, trace] = result;
    write_trace(out / "trace.csv", trace);
    csv::CsvWriter w(out / "solution.csv");
    w.comment("converged pole of the open chain; kind branch: " + o.lv_kind);
    w.comment("units: E in t_h, K in 1/dx");
    w.comment("iterations = " + std::to_string(trace.iterations));
    w.header({"re_K", "im_K", "re_E", "im_E", "kind", "residual"});
    w.raw_row({csv::format(st.K.k), csv::format(-st.K.kappa), csv::format(st.E.epsilon),
               csv::format(-st.E.half_gamma), kind_name(st.kind), csv::format(st.residual)});
}

void run_lattice_exact(const Opts& o, const fs::path& out) {
    const auto states = lattice::exact_two_site_reference(o.lx_v0);
    csv::CsvWriter w(out / "exact.csv");
    w.comment("closed-form poles of the two-site chain, V0/t_h = " + csv::format(o.lx_v0));
    w.comment("units: E in t_h, K in 1/dx");
    w.header({"parity", "re_K", "im_K", "re_E", "im_E", "kind", "residual"});
    for (const auto& st : states)
        w.raw_row({parity_name(st.parity), csv::format(st.K.k), csv::format(-st.K.kappa),
                   csv::format(st.E.epsilon), csv::format(-st.E.half_gamma), kind_name(st.kind),
                   csv::format(st.residual)});
}

/* ------------------------------------------------------------------ */
/* friedrichs actions                                                  */

void run_friedrichs_roots(const Opts& o, const fs::path& out) {
    friedrichs::FriedrichsModel model;
    model.g_tilde = o.frr_g;
    model.Ed_tilde = o.frr_ed;
    model.t_h = o.frr_t_h;
    model.validate();
    const auto states = friedrichs::quartic_roots(model);
    csv::CsvWriter w(out / "roots.csv");
    w.comment("Friedrichs chain quartic roots, g/t_h = " + csv::format(o.frr_g) +
              ", Ed/t_h = " + csv::format(o.frr_ed));
    w.comment("units: E in t_h, K in 1/dx; z = e^{i K dx}");
    w.header({"root_id", "re_z", "im_z", "re_K", "im_K", "re_E", "im_E", "kind",
              "energy_plane_residual"});
    for (int i = 0; i < 4; ++i) {
        const auto& st = states[static_cast<size_t>(i)];
        w.raw_row({std::string(1, static_cast<char>('a' + i)), csv::format(st.z.real()),
                   csv::format(st.z.imag()), csv::format(st.K.k), csv::format(-st.K.kappa),
                   csv::format(st.E.epsilon), csv::format(-st.E.half_gamma), kind_name(st.kind),
                   csv::format(friedrichs::energy_plane_check(st, model))});
    }
}

void run_friedrichs_sweep(const Opts& o, const fs::path& out) {
    write_sweep(out / "sweep.csv", o.frs_g, o.frs_ed_min, o.frs_ed_max, o.frs_n, o.frs_t_h);
}

void run_friedrichs_eigenfunction(const Opts& o, const fs::path& out) {
    friedrichs::FriedrichsModel model;
    model.g_tilde = o.fre_g;
    model.Ed_tilde = o.fre_ed;
    model.t_h = o.fre_t_h;
    model.validate();
    const auto states = friedrichs::quartic_roots(model);
    const auto& st = states[static_cast<size_t>(friedrichs_root_index(o.fre_root))];
    const WaveField w = friedrichs::eigenfunction(st, model, o.fre_half_width);
    csv::CsvWriter outw(out / "eigenfunction.csv");
    outw.comment("root " + o.fre_root + ": z = " + csv::format(st.z.real()) + " + i " +
                 csv::format(st.z.imag()) + ", kind " + kind_name(st.kind));
    outw.comment("adatom amplitude fixed to 1");
    outw.header({"x", "re_psi", "im_psi", "abs_psi"});
    for (int x = -w.half_width; x <= w.half_width; ++x) {
        const complex v = w.amplitude(x);
        outw.row({static_cast<double>(x), v.real(), v.imag(), std::abs(v)});
    }
}

/* ------------------------------------------------------------------ */
/* dynamics action                                                     */

void write_series(const fs::path& file, const char* what,
                  const std::vector<std::pair<double, complex>>& series) {
    csv::CsvWriter out(file);
    out.comment(what);
    out.header({"t", "re", "im", "abs"});
    for (const auto& [t, v] : series) out.row({t, v.real(), v.imag(), std::abs(v)});
}

void run_dynamics(const Opts& o, const fs::path& out) {
    dynamics::EvolutionConfig cfg;
    cfg.dt = o.dy_dt;
    cfg.t_end = o.dy_t_end;
    cfg.record_every = o.dy_record_every;

    std::vector<WaveField> snapshots;
    ComplexEnergy energy;
    double t_h = o.dy_t_h;

    ModelFile mf;
    bool use_friedrichs = (o.dy_preset == "friedrichs");
    if (!o.dy_model_file.empty()) {
        mf = read_model_file(o.dy_model_file);
        use_friedrichs = (mf.type == "friedrichs");
    } else if (o.dy_preset != "friedrichs" && o.dy_preset != "two-site") {
        throw Error("unknown preset '" + o.dy_preset + "'");
    }

    if (use_friedrichs) {
        friedrichs::FriedrichsModel model;
        model.g_tilde = o.dy_g;
        model.Ed_tilde = o.dy_ed;
        model.t_h = o.dy_t_h;
        if (!o.dy_model_file.empty()) {
            for (const auto& [key, value] : mf.scalars) {
                if (key == "g")
                    model.g_tilde = value;
                else if (key == "ed")
                    model.Ed_tilde = value;
                else if (key == "t_h")
                    model.t_h = value;
                else
                    throw Error("key '" + key + "' does not apply to a friedrichs model");
            }
            if (!mf.sites.empty())
                throw Error("site entries do not apply to a friedrichs model");
        }
        model.validate();
        t_h = model.t_h;
        const auto states = friedrichs::quartic_roots(model);
        const auto& st = states[static_cast<size_t>(friedrichs_root_index(o.dy_state))];
        energy = st.E;
        const WaveField init = friedrichs::eigenfunction(st, model, o.dy_half_width);
        snapshots = dynamics::evolve(model, init, st, cfg);
    } else {
        if (o.dy_e0.empty()) throw Error("lattice dynamics needs --e0 re,im");
        lattice::LatticeModel model = !o.dy_model_file.empty()
                                          ? lattice_from_file(mf)
                                          : two_site_model(o.dy_v0 * o.dy_t_h, o.dy_t_h);
        t_h = model.t_h;
        const LeadKind kind = parse_kind(o.dy_kind);
        const auto [st, trace] =
            lattice::self_consistent_pole(model, parse_complex(o.dy_e0), 1e-12, 60, kind);
        energy = st.E;
        lattice::LatticeModel big = model;
        big.half_width_L = std::max(model.half_width_L, o.dy_half_width);
        const auto H = lattice::assemble(big, st.E.value(), kind);
        Eigen::VectorXcd v;
        try {
            v = lattice::boundary_eigenvector(H, st.E.value(), 0);
        } catch (const Error&) {
            v = lattice::boundary_eigenvector(H, st.E.value(), 1);  // odd states: node at 0
        }
        WaveField init;
        init.time = 0.0;
        init.half_width = big.half_width_L;
        init.sites.assign(v.data(), v.data() + v.size());
        snapshots = dynamics::evolve(big, init, st, cfg);
    }

    nlohmann::json index;
    index["units"] = {{"hbar", cfg.units.hbar}, {"mass", cfg.units.mass}, {"t_h", t_h},
                      {"dx", 1.0}};
    index["energy"] = {{"re", energy.value().real()}, {"im", energy.value().imag()}};
    index["gamma"] = energy.gamma();
    index["dt"] = cfg.dt;
    index["t_end"] = cfg.t_end;
    index["record_every"] = cfg.record_every;
    index["frames"] = nlohmann::json::array();

    std::vector<std::pair<double, complex>> probe_series, adatom_series;
    for (size_t i = 0; i < snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.csv", i);
        write_frame(out / name, snapshots[i], -1);
        index["frames"].push_back({{"t", snapshots[i].time}, {"file", name}});
        if (std::abs(o.dy_probe) <= snapshots[i].half_width)
            probe_series.emplace_back(snapshots[i].time, snapshots[i].amplitude(o.dy_probe));
        if (snapshots[i].adatom.has_value())
            adatom_series.emplace_back(snapshots[i].time, *snapshots[i].adatom);
    }
    std::ofstream jf(out / "frames.json", std::ios::binary);
    if (!jf) throw Error("cannot write " + (out / "frames.json").string());
    jf << index.dump(2) << '\n';

    if (!probe_series.empty())
        write_series(out / "probe_series.csv",
                     ("amplitude at site " + std::to_string(o.dy_probe)).c_str(), probe_series);
    if (!adatom_series.empty())
        write_series(out / "adatom_series.csv", "adatom amplitude", adatom_series);
}

/* ------------------------------------------------------------------ */
/* jost actions                                                        */

void run_jost_smatrix(const Opts& o, const fs::path& out) {
    csv::CsvWriter w(out / "smatrix.csv");
    w.comment("partial-wave S matrix for the " + o.jp_potential + " potential");
    w.comment("units: hbar = m = 1");
    w.header({"k", "l", "re_S", "im_S", "abs_S"});
    const auto grid = linspace(o.js_k_min, o.js_k_max, o.js_n);
    for (int l = 0; l <= o.js_l_max; ++l) {
        const auto prob = make_radial_problem(o, l);
        for (const double k : grid) {
            const complex S = jost::partial_wave_smatrix(prob, complex(k, 0.0));
            w.raw_row({csv::format(k), csv::format(static_cast<double>(l)),
                       csv::format(S.real()), csv::format(S.imag()), csv::format(std::abs(S))});
        }
    }
}

void run_jost_poles(const Opts& o, const fs::path& out) {
    const auto prob = make_radial_problem(o, o.jo_l);
    jost::KRegion region;
    region.re_min = o.jo_re_min;
    region.re_max = o.jo_re_max;
    region.n_re = o.jo_n_re;
    region.im_min = o.jo_im_min;
    region.im_max = o.jo_im_max;
    region.n_im = o.jo_n_im;
    jost::PoleSearchDiagnostics diag;
    const auto poles = jost::pole_search(prob, region, &diag);
    csv::CsvWriter w(out / "poles.csv");
    w.comment("zeros of the Jost function f_+(k), l = " + std::to_string(o.jo_l));
    w.comment("units: hbar = m = 1");
    w.comment("seeds = " + std::to_string(diag.seeds) + ", failed = " +
              std::to_string(diag.failed));
    w.header({"re_k", "im_k", "re_E", "im_E", "kind", "residual"});
    for (const auto& st : poles)
        w.raw_row({csv::format(st.K.k), csv::format(-st.K.kappa), csv::format(st.E.epsilon),
                   csv::format(-st.E.half_gamma), kind_name(st.kind), csv::format(st.residual)});
}

void run_jost_sigma(const Opts& o, const fs::path& out) {
    const auto base = make_radial_problem(o, 0);
    const auto cs = jost::cross_section(base, o.jx_l_max, o.jx_k, o.jx_n_theta);
    csv::CsvWriter w(out / "sigma.csv");
    w.comment("differential cross section, k = " + csv::format(o.jx_k) + ", l <= " +
              std::to_string(o.jx_l_max));
    w.comment("units: hbar = m = 1");
    w.comment("sigma_total = " + csv::format(cs.sigma_total));
    w.comment("truncation_ratio = " + csv::format(cs.truncation_ratio));
    for (size_t l = 0; l < cs.s_values.size(); ++l)
        w.comment("S_" + std::to_string(l) + " = " + csv::format(cs.s_values[l].real()) + ", " +
                  csv::format(cs.s_values[l].imag()));
    w.header({"theta", "dsigma_domega"});
    for (size_t i = 0; i < cs.theta.size(); ++i) w.row({cs.theta[i], cs.dsigma_domega[i]});
}

/* ------------------------------------------------------------------ */
/* figure data                                                         */

void run_figure(const Opts& o, const fs::path& out) {
    const double ratios[] = {0.1, 1.0, 3.5, 4.0, 10.0};
    if (o.fig_id == "fig3" || o.fig_id == "fig4") {
        for (int i = 0; i < 5; ++i) {
            delta_well::DoubleDeltaModel model;
            model.a_over_l = ratios[i];
            model.validate();
            const std::string panel(1, static_cast<char>('a' + i));
            if (o.fig_id == "fig3")
                write_parity_curves(out / ("fig3_" + panel + ".csv"), model, 0.01, 8.0, 800);
            else
                write_transmission(out / ("fig4_" + panel + ".csv"), model, 0.02, 6.3, 1200);
        }
    } else if (o.fig_id == "fig5") {
        write_sweep(out / "fig5.csv", 0.1, -2.0, 2.0, 401, 1.0);
    } else if (o.fig_id == "fig8") {
        lattice::ComplexRectangle rect;
        rect.re_min = -0.5;
        rect.re_max = -0.2;
        rect.n_re = 200;
        rect.im_min = -0.2;
        rect.im_max = 0.0;
        rect.n_im = 200;
        write_scan(out / "fig8.csv", out / "fig8_minima.csv", two_site_model(1.0, 1.0), rect,
                   LeadKind::retarded_decaying);
    } else if (o.fig_id == "fig9") {
        const auto [st, trace] = lattice::self_consistent_pole(two_site_model(1.0, 1.0),
                                                               complex(-0.3, -0.1), 1e-12, 60);
        complex exact = st.E.value();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& ref : lattice::exact_two_site_reference(1.0)) {
            const double d = std::abs(ref.E.value() - st.E.value());
            if (d < best) {
                best = d;
                exact = ref.E.value();
            }
        }
        csv::CsvWriter w(out / "fig9.csv");
        w.comment("distance of the iteration postulates to the closed-form pole");
        w.header({"q", "log10_residual"});
        for (size_t q = 0; q < trace.postulates.size(); ++q) {
            const double d = std::abs(trace.postulates[q] - exact);
            if (d > 0.0) w.row({static_cast<double>(q), std::log10(d)});
        }
    } else if (o.fig_id == "fig12" || o.fig_id == "fig13") {
        friedrichs::FriedrichsModel model;
        const auto states = friedrichs::quartic_roots(model);  // g~ = 0.1, Ed~ = -0.5
        for (int i = 0; i < 4; ++i) {
            const auto& st = states[static_cast<size_t>(i)];
            const std::string label(1, static_cast<char>('a' + i));
            if (o.fig_id == "fig12") {
                write_frame(out / ("fig12_" + label + ".csv"),
                            friedrichs::eigenfunction(st, model, 20), -1);
                continue;
            }
            dynamics::EvolutionConfig cfg;
            cfg.dt = 0.05;
            cfg.t_end = 60.0;
            cfg.record_every = 400;  // frames at t = 0, 20, 40, 60
            const WaveField init = friedrichs::eigenfunction(st, model, 200);
            const auto snapshots = dynamics::evolve(model, init, st, cfg);
            for (const auto& frame : snapshots) {
                const long t_label = std::lround(frame.time);
                write_frame(out / ("fig13_" + label + "_t" + std::to_string(t_label) + ".csv"),
                            frame, 20);
            }
        }
    } else {
        throw Error("unknown figure id '" + o.fig_id + "'");
    }
}

/* ------------------------------------------------------------------ */
/* app assembly                                                        */

void add_leaf(CLI::App* leaf, Opts& o, void (*fn)(const Opts&, const fs::path&)) {
    leaf->configurable(true);
    leaf->fallthrough();
    leaf->callback([&o, fn] { o.selected = fn; });
}

void build_app(CLI::App& app, Opts& o) {
    app.option_defaults()->always_capture_default(true);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a manifest or config file");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("--out", o.out, "Output directory (relative paths honor SIEGERT_OUT_ROOT)");
    app.add_option("--seed", o.seed, "Seed recorded for randomized property tests");
    app.add_option("--threads", o.threads,
                   "Maximum worker threads, 0 = hardware default (current numerics are serial)");

    auto* dw = app.add_subcommand("delta-well", "Double-delta barrier Siegert states");
    dw->configurable(true);
    dw->fallthrough();
    dw->require_subcommand(1);
    auto* dwr = dw->add_subcommand("roots", "Outgoing-wave roots in one or both parity sectors");
    dwr->add_option("--a-over-l", o.dwr_a, "Barrier strength ratio a/l")->required();
    dwr->add_option("--parity", o.dwr_parity, "even, odd or both")
        ->check(CLI::IsMember({"even", "odd", "both"}));
    dwr->add_option("--xi-min", o.dwr_xi_min, "Lower end of the Re(K l) window");
    dwr->add_option("--xi-max", o.dwr_xi_max, "Upper end of the Re(K l) window");
    dwr->add_option("--tol", o.dwr_tol, "Newton tolerance on the root equation");
    dwr->add_flag("--mirrors", o.dwr_mirrors, "Include the mirror roots at -K*");
    dwr->add_flag("--json", o.dwr_json, "Also write roots.json");
    add_leaf(dwr, o, run_dw_roots);
    auto* dwc = dw->add_subcommand("curves", "Fixed-point and modulus root curves");
    dwc->add_option("--a-over-l", o.dwc_a, "Barrier strength ratio a/l")->required();
    dwc->add_option("--xi-min", o.dwc_xi_min, "Lower end of the xi grid");
    dwc->add_option("--xi-max", o.dwc_xi_max, "Upper end of the xi grid");
    dwc->add_option("--n", o.dwc_n, "Grid points");
    add_leaf(dwc, o, run_dw_curves);
    auto* dwt = dw->add_subcommand("transmission", "Transmission probability on the real axis");
    dwt->add_option("--a-over-l", o.dwt_a, "Barrier strength ratio a/l")->required();
    dwt->add_option("--k-min", o.dwt_k_min, "Lower end of the k l grid (> 0)");
    dwt->add_option("--k-max", o.dwt_k_max, "Upper end of the k l grid");
    dwt->add_option("--n", o.dwt_n, "Grid points");
    add_leaf(dwt, o, run_dw_transmission);

    auto* fx = app.add_subcommand("flux", "Decay-rate and particle-number identities");
    fx->configurable(true);
    fx->fallthrough();
    fx->require_subcommand(1);
    auto* fxr = fx->add_subcommand("report", "Flux identity for one root or a sampled frame");
    fxr->add_option("--a-over-l", o.fr_a, "Barrier strength ratio a/l");
    fxr->add_option("--parity", o.fr_parity, "Parity sector of the root")
        ->check(CLI::IsMember({"even", "odd"}));
    fxr->add_option("--index", o.fr_index, "Root index within the search window");
    fxr->add_option("--L", o.fr_L, "Segment half width");
    fxr->add_option("--psi-file", o.fr_psi_file,
                    "Frame CSV (x, re, im) to check the segment identity on");
    add_leaf(fxr, o, run_flux_report);
    auto* fxe = fx->add_subcommand("expanding", "Particle number in an expanding window");
    fxe->add_option("--a-over-l", o.fe_a, "Barrier strength ratio a/l");
    fxe->add_option("--parity", o.fe_parity, "Parity sector of the root")
        ->check(CLI::IsMember({"even", "odd"}));
    fxe->add_option("--index", o.fe_index, "Root index within the search window");
    fxe->add_option("--t-min", o.fe_t_min, "First time");
    fxe->add_option("--t-max", o.fe_t_max, "Last time");
    fxe->add_option("--n", o.fe_n, "Time grid points");
    fxe->add_option("--fixed-L", o.fe_fixed_L, "Freeze the window at this half width");
    fxe->add_flag("--pure-tail", o.fe_pure_tail, "Count only the outgoing tail");
    add_leaf(fxe, o, run_flux_expanding);

    auto* lt = app.add_subcommand("lattice", "Open tight-binding chains");
    lt->configurable(true);
    lt->fallthrough();
    lt->require_subcommand(1);
    auto* lts = lt->add_subcommand("scan", "log10 |det| landscape over an energy rectangle");
    lts->add_option("--preset", o.ls_preset, "Built-in model (two-site)");
    lts->add_option("--v0", o.ls_v0, "Preset barrier strength V0/t_h");
    lts->add_option("--t-h", o.ls_t_h, "Hopping energy");
    lts->add_option("--model", o.ls_model_file, "Lattice model file instead of a preset");
    lts->add_option("--re-min", o.ls_re_min, "Re E lower edge");
    lts->add_option("--re-max", o.ls_re_max, "Re E upper edge");
    lts->add_option("--n-re", o.ls_n_re, "Re E grid points");
    lts->add_option("--im-min", o.ls_im_min, "Im E lower edge");
    lts->add_option("--im-max", o.ls_im_max, "Im E upper edge");
    lts->add_option("--n-im", o.ls_n_im, "Im E grid points");
    lts->add_option("--kind", o.ls_kind, "Boundary branch")
        ->check(CLI::IsMember({"retarded", "advanced"}));
    add_leaf(lts, o, run_lattice_scan);
    auto* ltv = lt->add_subcommand("solve", "Self-consistent pole iteration");
    ltv->add_option("--preset", o.lv_preset, "Built-in model (two-site)");
    ltv->add_option("--v0", o.lv_v0, "Preset barrier strength V0/t_h");
    ltv->add_option("--t-h", o.lv_t_h, "Hopping energy");
    ltv->add_option("--model", o.lv_model_file, "Lattice model file instead of a preset");
    ltv->add_option("--e0", o.lv_e0, "First postulate re,im")->required();
    ltv->add_option("--tol", o.lv_tol, "Convergence tolerance on |E(q) - E(q-1)|");
    ltv->add_option("--max-iter", o.lv_max_iter, "Iteration cap");
    ltv->add_option("--beta", o.lv_beta, "Update mixing in (0, 1], 1 = plain iteration");
    ltv->add_option("--kind", o.lv_kind, "Boundary branch")
        ->check(CLI::IsMember({"retarded", "advanced"}));
    add_leaf(ltv, o, run_lattice_solve);
    auto* ltx = lt->add_subcommand("exact", "Closed-form two-site reference poles");
    ltx->add_option("--v0", o.lx_v0, "Barrier strength V0/t_h");
    add_leaf(ltx, o, run_lattice_exact);

    auto* fr = app.add_subcommand("friedrichs", "Discrete Friedrichs chain with one adatom");
    fr->configurable(true);
    fr->fallthrough();
    fr->require_subcommand(1);
    auto* frr = fr->add_subcommand("roots", "The four quartic roots at one coupling");
    frr->add_option("--g", o.frr_g, "Coupling g/t_h");
    frr->add_option("--ed", o.frr_ed, "Adatom level Ed/t_h");
    frr->add_option("--t-h", o.frr_t_h, "Hopping energy");
    add_leaf(frr, o, run_friedrichs_roots);
    auto* frs = fr->add_subcommand("sweep", "Roots tracked across a range of adatom levels");
    frs->add_option("--g", o.frs_g, "Coupling g/t_h");
    frs->add_option("--ed-min", o.frs_ed_min, "First adatom level");
    frs->add_option("--ed-max", o.frs_ed_max, "Last adatom level");
    frs->add_option("--n", o.frs_n, "Sweep points");
    frs->add_option("--t-h", o.frs_t_h, "Hopping energy");
    add_leaf(frs, o, run_friedrichs_sweep);
    auto* fre = fr->add_subcommand("eigenfunction", "Site amplitudes of one root");
    fre->add_option("--g", o.fre_g, "Coupling g/t_h");
    fre->add_option("--ed", o.fre_ed, "Adatom level Ed/t_h");
    fre->add_option("--t-h", o.fre_t_h, "Hopping energy");
    fre->add_option("--root", o.fre_root, "Root label a..d")
        ->check(CLI::IsMember({"a", "b", "c", "d"}));
    fre->add_option("--half-width", o.fre_half_width, "Sites on each side of the origin");
    add_leaf(fre, o, run_friedrichs_eigenfunction);

    auto* dy = app.add_subcommand("dynamics", "Time evolution under the effective Hamiltonian");
    dy->configurable(true);
    dy->fallthrough();
    dy->require_subcommand(1);
    auto* dyr = dy->add_subcommand("run", "Evolve one boundary eigenstate and record frames");
    dyr->add_option("--model", o.dy_model_file, "Model file (type = lattice or friedrichs)");
    dyr->add_option("--preset", o.dy_preset, "Built-in model (friedrichs or two-site)")
        ->check(CLI::IsMember({"friedrichs", "two-site"}));
    dyr->add_option("--g", o.dy_g, "Friedrichs coupling g/t_h");
    dyr->add_option("--ed", o.dy_ed, "Friedrichs adatom level Ed/t_h");
    dyr->add_option("--t-h", o.dy_t_h, "Hopping energy");
    dyr->add_option("--v0", o.dy_v0, "two-site barrier strength V0/t_h");
    dyr->add_option("--state", o.dy_state, "Friedrichs root label a..d")
        ->check(CLI::IsMember({"a", "b", "c", "d"}));
    dyr->add_option("--e0", o.dy_e0, "Pole seed re,im (lattice models)");
    dyr->add_option("--kind", o.dy_kind, "Boundary branch for lattice models")
        ->check(CLI::IsMember({"retarded", "advanced"}));
    dyr->add_option("--half-width", o.dy_half_width, "Chain half width for the run");
    dyr->add_option("--dt", o.dy_dt, "Time step");
    dyr->add_option("--t-end", o.dy_t_end, "Final time");
    dyr->add_option("--record-every", o.dy_record_every, "Steps between recorded frames");
    dyr->add_option("--probe", o.dy_probe, "Site whose amplitude is written as a time series");
    add_leaf(dyr, o, run_dynamics);

    auto* jt = app.add_subcommand("jost", "Radial Jost functions, S matrix and poles");
    jt->configurable(true);
    jt->fallthrough();
    jt->require_subcommand(1);
    const auto add_potential = [&o](CLI::App* sub) {
        sub->add_option("--potential", o.jp_potential, "exponential or square-well")
            ->check(CLI::IsMember({"exponential", "square-well"}));
        sub->add_option("--v0", o.jp_v0, "Well depth (positive = attractive)");
        sub->add_option("--range", o.jp_range, "Potential range");
        sub->add_option("--smooth-width", o.jp_smooth_width,
                        "Edge smoothing of the square well, 0 = range/5000");
        sub->add_option("--r-min", o.jp_r_min, "Inner end of the integration, 0 = auto");
        sub->add_option("--r-max", o.jp_r_max, "Outer end of the integration, 0 = auto");
    };
    auto* jts = jt->add_subcommand("smatrix", "S_l(k) on a real-k grid");
    add_potential(jts);
    jts->add_option("--l-max", o.js_l_max, "Largest partial wave");
    jts->add_option("--k-min", o.js_k_min, "First wave number");
    jts->add_option("--k-max", o.js_k_max, "Last wave number");
    jts->add_option("--n", o.js_n, "Grid points");
    add_leaf(jts, o, run_jost_smatrix);
    auto* jto = jt->add_subcommand("poles", "Zeros of f_+(k) in a complex rectangle");
    add_potential(jto);
    jto->add_option("--l", o.jo_l, "Partial wave");
    jto->add_option("--re-min", o.jo_re_min, "Re k lower edge");
    jto->add_option("--re-max", o.jo_re_max, "Re k upper edge");
    jto->add_option("--n-re", o.jo_n_re, "Re k scan points");
    jto->add_option("--im-min", o.jo_im_min, "Im k lower edge");
    jto->add_option("--im-max", o.jo_im_max, "Im k upper edge");
    jto->add_option("--n-im", o.jo_n_im, "Im k scan points");
    add_leaf(jto, o, run_jost_poles);
    auto* jtx = jt->add_subcommand("sigma", "Differential and total cross section");
    add_potential(jtx);
    jtx->add_option("--l-max", o.jx_l_max, "Largest partial wave");
    jtx->add_option("--k", o.jx_k, "Wave number");
    jtx->add_option("--n-theta", o.jx_n_theta, "Angular grid points");
    add_leaf(jtx, o, run_jost_sigma);

    auto* fig = app.add_subcommand("figure", "Plot-ready CSV data sets");
    fig->add_option("id", o.fig_id, "One of fig3, fig4, fig5, fig8, fig9, fig12, fig13")
        ->required()
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig8", "fig9", "fig12", "fig13"}));
    add_leaf(fig, o, run_figure);
}

void write_manifest(const fs::path& out_dir, CLI::App& app) {
    fs::create_directories(out_dir);
    const fs::path path = out_dir / "manifest.ini";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << "# reproduce with: siegert --config manifest.ini\n";
    f << app.config_to_str(false, false);
    f << "# --- fully resolved values ---\n";
    std::istringstream resolved(app.config_to_str(true, false));
    std::string line;
    while (std::getline(resolved, line)) f << "# " << line << '\n';
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const delta_well::NoConvergence*>(&e) != nullptr ||
        dynamic_cast<const lattice::NotConverged*>(&e) != nullptr ||
        dynamic_cast<const lattice::OscillationDetected*>(&e) != nullptr ||
        dynamic_cast<const lattice::NoConvergenceQR*>(&e) != nullptr ||
        dynamic_cast<const jost::NoConvergence*>(&e) != nullptr ||
        dynamic_cast<const jost::ExtrapolationUnstable*>(&e) != nullptr ||
        dynamic_cast<const dynamics::UnstableStep*>(&e) != nullptr)
        return 3;
    return 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    Opts o;
    CLI::App app{"Siegert-state toolkit for open quantum systems", "siegert"};
    build_app(app, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (o.selected == nullptr) {
        std::cerr << app.help();
        return 2;
    }

    try {
        const fs::path out = resolve_out(o.out);
        write_manifest(out, app);
        o.selected(o, out);
    } catch (const std::exception& e) {
        std::cerr << "siegert: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace siegert::cli
