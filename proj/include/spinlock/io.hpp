#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinlock/conditions.hpp"
#include "spinlock/kepler.hpp"
#include "spinlock/scan.hpp"
#include "spinlock/solver.hpp"

namespace spinlock::io {

using nlohmann::json;

/// Numeric formatting used by every CSV writer. Negative zero is folded
/// into plain zero so equal values always print identically.
inline std::string format_double(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
}

// --- orbit ------------------------------------------------------------

inline void write_orbit_csv(std::ostream& os, const kepler::Orbit& orb,
                            const std::vector<double>& times) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(times.size());
    for (double t : times) {
        const auto s = kepler::orbit_state(orb, t);
        rows.push_back({format_double(s.t), format_double(s.u), format_double(s.r),
                        format_double(s.f), format_double(s.f_dot),
                        format_double(s.f_ddot)});
    }
    write_csv(os, {"t", "u", "r", "f", "f_dot", "f_ddot"}, rows);
}

inline json orbit_to_json(const kepler::Orbit& orb, const std::vector<double>& times) {
    json samples = json::array();
    for (double t : times) {
        const auto s = kepler::orbit_state(orb, t);
        samples.push_back({{"t", s.t},
                           {"u", s.u},
                           {"r", s.r},
                           {"f", s.f},
                           {"f_dot", s.f_dot},
                           {"f_ddot", s.f_ddot}});
    }
    return json{{"a", orb.a}, {"e", orb.e}, {"samples", samples}};
}

// --- parameters and coupling family ------------------------------------

inline json params_to_json(const potential::SystemParams& p) {
    return json{{"e", p.e},           {"a", p.a},
                {"C1", p.C1},         {"C2", p.C2},
                {"lambda1", p.lambda1}, {"lambda2", p.lambda2},
                {"dhat1", p.dhat1},   {"dhat2", p.dhat2},
                {"qhat1", p.qhat1},   {"qhat2", p.qhat2},
                {"M1", p.M1},         {"M2", p.M2},
                {"Lambda1", p.Lambda1()}, {"Lambda2", p.Lambda2()}};
}

inline json lambda_set_to_json(const potential::LambdaSet& ls) {
    json couplings = json::array();
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs)
        couplings.push_back({{"m1", m1}, {"m2", m2}, {"value", ls.coupling(m1, m2)}});
    return json{{"Lambda0", ls.Lambda0},
                {"Lambda1", ls.Lambda1},
                {"Lambda2", ls.Lambda2},
                {"couplings", couplings}};
}

inline void write_lambda_set_csv(std::ostream& os, const potential::LambdaSet& ls) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs)
        rows.push_back({std::to_string(m1), std::to_string(m2),
                        format_double(ls.coupling(m1, m2))});
    write_csv(os, {"m1", "m2", "value"}, rows);
}

// --- analytic conditions ------------------------------------------------

inline json conditions_to_json(const conditions::UniquenessResult& u,
                               const conditions::LinearStabilityResult& l) {
    return json{{"uniqueness",
                 {{"holds", u.holds},
                  {"margin", u.margin},
                  {"rhs", u.rhs},
                  {"alpha1", u.alpha.alpha1},
                  {"alpha2", u.alpha.alpha2},
                  {"alpha_lambda1", u.alpha.alpha_lambda1},
                  {"alpha_lambda2", u.alpha.alpha_lambda2}}},
                {"linear_stability",
                 {{"est1", l.est1},
                  {"est2", l.est2},
                  {"est3", l.est3},
                  {"all", l.all},
                  {"margin1", l.margin1},
                  {"margin2", l.margin2},
                  {"margin3", l.margin3},
                  {"m_bound", l.m}}}};
}

// --- periodic solutions -------------------------------------------------

/// `samples` counts the rows, spread uniformly over [0, 2*pi] including both
/// endpoints (so 129 rows step by 2*pi/128).
inline json periodic_to_json(const solver::PeriodicSolution& sol, int samples = 129) {
    if (samples < 2) throw DomainError("periodic output needs at least 2 samples");
    json out{{"x0", {sol.x0[0], sol.x0[1]}},
             {"v0", {sol.v0[0], sol.v0[1]}},
             {"delta", {sol.delta.delta1, sol.delta.delta2}},
             {"amplitude", sol.amplitude},
             {"residual", sol.residual},
             {"odd_symmetric", sol.orbit.odd_symmetric()}};
    json rows = json::array();
    for (int i = 0; i < samples; ++i) {
        const double t = solver::two_pi * i / (samples - 1);
        const auto s = sol.orbit.state(t);
        rows.push_back({{"t", t},
                        {"Theta1", s[0]},
                        {"Theta2", s[1]},
                        {"dTheta1", s[2]},
                        {"dTheta2", s[3]}});
    }
    out["samples"] = rows;
    return out;
}

inline void write_periodic_csv(std::ostream& os, const solver::PeriodicSolution& sol,
                               int samples = 129) {
    if (samples < 2) throw DomainError("periodic output needs at least 2 samples");
    os << "# v0," << format_double(sol.v0[0]) << "," << format_double(sol.v0[1]) << "\n";
    os << "# residual," << format_double(sol.residual) << "\n";
    os << "# amplitude," << format_double(sol.amplitude) << "\n";
    std::vector<std::vector<std::string>> rows;
    rows.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = solver::two_pi * i / (samples - 1);
        const auto s = sol.orbit.state(t);
        rows.push_back({format_double(t), format_double(s[0]), format_double(s[1]),
                        format_double(s[2]), format_double(s[3])});
    }
    write_csv(os, {"t", "Theta1", "Theta2", "dTheta1", "dTheta2"}, rows);
}

/// Polyline plot of the two spin offsets over one period.
inline void write_periodic_svg(std::ostream& os, const solver::PeriodicSolution& sol,
                               int samples = 512) {
    const double W = 800, H = 500, ml = 60, mr = 20, mt = 20, mb = 40;
    std::vector<double> t(samples + 1);
    std::vector<std::array<double, 2>> th(samples + 1);
    double ymin = 0.0, ymax = 0.0;
    for (int i = 0; i <= samples; ++i) {
        t[i] = solver::two_pi * i / samples;
        const auto s = sol.orbit.state(t[i]);
        th[i] = {s[0], s[1]};
        ymin = std::min({ymin, s[0], s[1]});
        ymax = std::max({ymax, s[0], s[1]});
    }
    if (ymax - ymin < 1e-15) {
        ymax += 1.0;
        ymin -= 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto X = [&](double tt) { return ml + (W - ml - mr) * tt / solver::two_pi; };
    auto Y = [&](double v) { return mt + (H - mt - mb) * (ymax - v) / (ymax - ymin); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
       << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << Y(0.0) << "\" x2=\"" << W - mr
       << "\" y2=\"" << Y(0.0) << "\" stroke=\"#bbb\"/>\n";
    const char* colors[2] = {"#1565c0", "#c62828"};
    for (int c = 0; c < 2; ++c) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[c]
           << "\" stroke-width=\"1.5\" points=\"";
        for (int i = 0; i <= samples; ++i)
            os << format_double(X(t[i])) << "," << format_double(Y(th[i][c])) << " ";
        os << "\"/>\n";
    }
    os << "<text x=\"" << (W - mr) << "\" y=\"" << (H - 10)
       << "\" text-anchor=\"end\" font-size=\"14\">t / period</text>\n";
    os << "<text x=\"15\" y=\"" << mt + 14 << "\" font-size=\"14\">Theta_1 (blue), "
          "Theta_2 (red)</text>\n";
    os << "</svg>\n";
}

// --- Floquet analysis ----------------------------------------------------

inline json floquet_to_json(const solver::FloquetResult& f) {
    json mult = json::array();
    for (int i = 0; i < 4; ++i)
        mult.push_back({{"re", f.multipliers[i].real()},
                        {"im", f.multipliers[i].imag()},
                        {"modulus", std::abs(f.multipliers[i])}});
    json mono = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(f.monodromy(r, c));
        mono.push_back(row);
    }
    return json{{"multipliers", mult},
                {"monodromy", mono},
                {"max_modulus", f.max_modulus},
                {"conservative_stable", f.conservative_stable},
                {"strong_candidate", f.strong_candidate},
                {"dissipative_attracting", f.dissipative_attracting},
                {"det_defect", f.det_defect},
                {"symplectic_defect", f.symplectic_defect},
                {"scaled_coordinates", f.scaled}};
}

// --- stability diagrams ---------------------------------------------------

inline const char* geometry_name(scan::Geometry g) {
    return g == scan::Geometry::EqualBodies ? "equal-bodies" : "two-to-one";
}

inline void write_scan_csv(std::ostream& os, const scan::DiagramResult& d) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(d.cells.size());
    for (const auto& c : d.cells)
        rows.push_back({format_double(c.e), format_double(c.lambda),
                        format_double(d.request.qhat), c.analytic_unique ? "1" : "0",
                        c.analytic_stable ? "1" : "0", scan::to_string(c.status),
                        format_double(c.max_multiplier_modulus)});
    write_csv(os,
              {"e", "lambda", "qhat", "analytic_unique", "analytic_stable",
               "numeric_status", "max_multiplier_modulus"},
              rows);
}

inline json scan_to_json(const scan::DiagramResult& d) {
    json cells = json::array();
    for (const auto& c : d.cells) {
        json jc{{"e", c.e},
                {"lambda", c.lambda},
                {"status", scan::to_string(c.status)},
                {"max_multiplier_modulus", c.max_multiplier_modulus},
                {"analytic_unique", c.analytic_unique},
                {"analytic_stable", c.analytic_stable},
                {"amplitude", c.amplitude},
                {"residual", c.residual}};
        if (!c.error.empty()) jc["error"] = c.error;
        cells.push_back(std::move(jc));
    }
    return json{{"geometry", geometry_name(d.request.geometry)},
                {"qhat", d.request.qhat},
                {"delta", {d.request.delta.delta1, d.request.delta.delta2}},
                {"e_values", d.request.e_values},
                {"lambda_values", d.request.lambda_values},
                {"cells", cells}};
}

/// Raster plot: one rectangle per grid cell, colored by status.
inline void write_scan_svg(std::ostream& os, const scan::DiagramResult& d) {
    const std::size_t ne = d.request.e_values.size(),
                      nl = d.request.lambda_values.size();
    const double W = 800, H = 600, ml = 70, mr = 20, mt = 20, mb = 50;
    const double pw = (W - ml - mr) / ne, ph = (H - mt - mb) / nl;
    auto color = [](scan::CellStatus s) {
        switch (s) {
            case scan::CellStatus::Stable: return "#2e7d32";
            case scan::CellStatus::Marginal: return "#f9a825";
            case scan::CellStatus::Unstable: return "#c62828";
            default: return "#9e9e9e";
        }
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
       << "\">\n<rect width=\"" << W << "\" height=\"" << H
       << "\" fill=\"white\"/>\n";
    for (std::size_t il = 0; il < nl; ++il)
        for (std::size_t ie = 0; ie < ne; ++ie) {
            const auto& c = d.cells[il * ne + ie];
            os << "<rect x=\"" << format_double(ml + ie * pw) << "\" y=\""
               << format_double(mt + (nl - 1 - il) * ph) << "\" width=\""
               << format_double(pw + 0.5) << "\" height=\"" << format_double(ph + 0.5)
               << "\" fill=\"" << color(c.status) << "\"/>\n";
        }
    os << "<text x=\"" << ml << "\" y=\"" << H - 32
       << "\" font-size=\"13\">" << format_double(d.request.e_values.front())
       << "</text>\n";
    os << "<text x=\"" << ml + (W - ml - mr) / 2 << "\" y=\"" << H - 32
       << "\" text-anchor=\"middle\" font-size=\"14\">e</text>\n";
    os << "<text x=\"" << W - mr << "\" y=\"" << H - 32
       << "\" text-anchor=\"end\" font-size=\"13\">"
       << format_double(d.request.e_values.back()) << "</text>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << H - mb
       << "\" text-anchor=\"end\" font-size=\"13\">"
       << format_double(d.request.lambda_values.front()) << "</text>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << mt + 12
       << "\" text-anchor=\"end\" font-size=\"13\">"
       << format_double(d.request.lambda_values.back()) << "</text>\n";
    os << "<text x=\"15\" y=\"" << mt + (H - mt - mb) / 2
       << "\" font-size=\"14\" transform=\"rotate(-90 15,"
       << mt + (H - mt - mb) / 2 << ")\" text-anchor=\"middle\">lambda</text>\n";
    const std::pair<scan::CellStatus, const char*> legend[] = {
        {scan::CellStatus::Stable, "stable"},
        {scan::CellStatus::Marginal, "marginal"},
        {scan::CellStatus::Unstable, "unstable"},
        {scan::CellStatus::Failed, "failed"},
    };
    double lx = ml;
    for (const auto& [st, name] : legend) {
        os << "<rect x=\"" << lx << "\" y=\"" << H - 24
           << "\" width=\"14\" height=\"14\" fill=\"" << color(st) << "\"/>\n";
        os << "<text x=\"" << lx + 20 << "\" y=\"" << H - 12
           << "\" font-size=\"13\">" << name << "</text>\n";
        lx += 110;
    }
    os << "</svg>\n";
}

}  // namespace spinlock::io
