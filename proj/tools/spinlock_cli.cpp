// Batch front end for the spin-spin dynamics library. Subcommands cover the
// orbit solution, coupling coefficients, periodic solutions, Floquet
// analysis, analytic estimates, stability diagrams, gravity coefficients,
// the full Lagrangian model, and unit conversion. All input comes from a
// JSON configuration (defaults, optional --config file, --set overrides);
// results go to stdout or --output in CSV, JSON, or SVG.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <spinlock/spinlock.hpp>

using nlohmann::json;
using namespace spinlock;

namespace {

json default_config() {
    return json{
        {"system",
         {{"e", 2.0e-4},
          {"a", 27.2},
          {"C1", 0.97},
          {"lambda1", 3.3e-5},
          {"lambda2", 2.4e-3},
          {"dhat1", 1.5e-7},
          {"qhat1", 1.2e-6}}},
        {"delta", {0.0, 0.0}},
        {"integrator",
         {{"abs_tol", 1e-11}, {"rel_tol", 1e-11}, {"max_step", 0.0}, {"max_steps", 2000000}}},
        {"solver",
         {{"newton_tol", 1e-12},
          {"max_newton_iter", 30},
          {"multistart", "auto"},
          {"multistart_grid", 5}}},
        {"floquet",
         {{"unit_modulus_tol", 1e-6}, {"root_distance_tol", 1e-6}, {"attract_tol", 1e-9}}},
        {"continuation",
         {{"newton_tol", 1e-11},
          {"max_newton_iter", 20},
          {"steps", 10},
          {"min_step_fraction", 1e-6},
          {"block_tol", 1e-6}}},
        {"orbit", {{"t_min", 0.0}, {"t_max", 2.0 * solver::pi}, {"samples", 129}}},
        {"periodic", {{"samples", 129}}},
        {"scan",
         {{"geometry", "equal-bodies"},
          {"qhat", 0.0},
          {"e_min", 0.0},
          {"e_max", 0.9},
          {"e_count", 91},
          {"lambda_min", 0.005},
          {"lambda_max", 0.5},
          {"lambda_count", 100},
          {"threads", 0}}},
        {"bodies",
         {{"body1", {{"mass", 2.0}, {"semi_axes", {1.2, 1.0, 0.9}}}},
          {"body2", {{"mass", 1.0}, {"semi_axes", {0.8, 0.7, 0.65}}}}}},
        {"stokes", {{"body", "body1"}, {"max_degree", 4}, {"use_quadrature", false}}},
        {"full_model",
         {{"a_ref", 10.0},
          {"keplerian_orbital_part", false},
          {"t_max", 2.0 * solver::pi},
          {"samples", 129},
          {"state", json()}}},
        {"units",
         {{"period", 1.0},
          {"total_mass", 1.0},
          {"total_inertia", 1.0},
          {"value", 1.0},
          {"unit", "time"},
          {"direction", "to-model"}}},
    };
}

/// Apply one `path.to.key=value` override; the value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw DomainError("--set expects key.path=value, got: " + kv);
    const std::string path = kv.substr(0, eq), raw = kv.substr(eq + 1);
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw DomainError("--set: empty key component in " + kv);
        if (dot == std::string::npos) {
            json value;
            try {
                value = json::parse(raw);
            } catch (const json::parse_error&) {
                value = raw;
            }
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

potential::SystemParams params_from(const json& cfg) {
    const auto& s = cfg.at("system");
    return potential::SystemParams::from_parameters(
        s.at("e").get<double>(), s.at("a").get<double>(), s.at("C1").get<double>(),
        s.at("lambda1").get<double>(), s.at("lambda2").get<double>(),
        s.at("dhat1").get<double>(), s.at("qhat1").get<double>());
}

integrate::IntegratorConfig integrator_from(const json& cfg) {
    const auto& i = cfg.at("integrator");
    integrate::IntegratorConfig c;
    c.abs_tol = i.at("abs_tol").get<double>();
    c.rel_tol = i.at("rel_tol").get<double>();
    c.max_step = i.at("max_step").get<double>();
    c.max_steps = i.at("max_steps").get<std::int64_t>();
    return c;
}

solver::SolverOptions solver_from(const json& cfg) {
    const auto& s = cfg.at("solver");
    solver::SolverOptions o;
    o.integrator = integrator_from(cfg);
    o.newton_tol = s.at("newton_tol").get<double>();
    o.max_newton_iter = s.at("max_newton_iter").get<int>();
    o.multistart_grid = s.at("multistart_grid").get<int>();
    const std::string mode = s.at("multistart").get<std::string>();
    if (mode == "auto")
        o.multistart = solver::Multistart::Auto;
    else if (mode == "always")
        o.multistart = solver::Multistart::Always;
    else if (mode == "never")
        o.multistart = solver::Multistart::Never;
    else
        throw DomainError("solver.multistart must be auto, always or never");
    return o;
}

solver::FloquetOptions floquet_from(const json& cfg) {
    const auto& f = cfg.at("floquet");
    solver::FloquetOptions o;
    o.integrator = integrator_from(cfg);
    o.unit_modulus_tol = f.at("unit_modulus_tol").get<double>();
    o.root_distance_tol = f.at("root_distance_tol").get<double>();
    o.attract_tol = f.at("attract_tol").get<double>();
    return o;
}

solver::ContinuationOptions continuation_from(const json& cfg) {
    const auto& c = cfg.at("continuation");
    solver::ContinuationOptions o;
    o.integrator = integrator_from(cfg);
    o.newton_tol = c.at("newton_tol").get<double>();
    o.max_newton_iter = c.at("max_newton_iter").get<int>();
    o.steps = c.at("steps").get<int>();
    o.min_step_fraction = c.at("min_step_fraction").get<double>();
    o.block_tol = c.at("block_tol").get<double>();
    return o;
}

dynamics::Dissipation delta_from(const json& cfg) {
    const auto& d = cfg.at("delta");
    return dynamics::Dissipation{d.at(0).get<double>(), d.at(1).get<double>()};
}

bodies::BodyShape body_from(const json& b) {
    const auto& ax = b.at("semi_axes");
    return bodies::BodyShape::from_semi_axes(b.at("mass").get<double>(),
                                             ax.at(0).get<double>(),
                                             ax.at(1).get<double>(),
                                             ax.at(2).get<double>());
}

solver::PeriodicSolution solve_from(const json& cfg, const potential::SystemParams& p,
                                    const potential::LambdaSet& ls) {
    const auto res = solver::solve_periodic_conservative(p, ls, solver_from(cfg));
    const auto delta = delta_from(cfg);
    if (delta.delta1 == 0.0 && delta.delta2 == 0.0) return res.primary;
    return solver::continue_dissipative(p, ls, res.primary, delta,
                                        continuation_from(cfg));
}

struct Output {
    std::string path;  // empty = stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error("cannot open output file: " + path);
        os << text;
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run(int argc, char** argv) {
    CLI::App app{"Spin-spin dynamics of two orbiting ellipsoids"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global options after the subcommand too

    std::string config_path, output_path, format;
    std::vector<std::string> overrides;
    int threads_flag = -1;
    bool show_config = false;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--set", overrides, "override a config entry: key.path=value");
    app.add_option("--output", output_path, "write the result to this file");
    app.add_option("--format", format, "output format: csv, json or svg");
    app.add_option("--threads", threads_flag, "worker threads for scans");
    app.add_flag("--show-config", show_config, "print the effective configuration and exit");

    auto* cmd_orbit = app.add_subcommand("orbit", "orbit solution samples");
    auto* cmd_lambdas = app.add_subcommand("lambdas", "coupling coefficients");
    auto* cmd_conditions =
        app.add_subcommand("conditions", "analytic uniqueness/stability estimates");
    auto* cmd_periodic = app.add_subcommand("periodic", "periodic solution");
    auto* cmd_floquet = app.add_subcommand("floquet", "monodromy and multipliers");
    auto* cmd_scan = app.add_subcommand("scan", "stability diagram over (e, lambda)");
    auto* cmd_stokes = app.add_subcommand("stokes", "gravity coefficients of a body");
    auto* cmd_full = app.add_subcommand("full-model", "coupled orbit-spin integration");
    auto* cmd_units = app.add_subcommand("convert-units", "convert to/from model units");

    CLI11_PARSE(app, argc, argv);

    json cfg = default_config();
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw Error("cannot open config file: " + config_path);
        json user = json::parse(is);
        cfg.merge_patch(user);
    }
    for (const auto& kv : overrides) apply_override(cfg, kv);
    if (threads_flag >= 0) {
        cfg["scan"]["threads"] = threads_flag;
    } else if (const char* env = std::getenv("SPINLOCK_THREADS")) {
        cfg["scan"]["threads"] = std::atoi(env);
    }

    if (show_config) {
        std::cout << dump(cfg);
        return 0;
    }

    const Output out{output_path};
    auto pick = [&](const char* def) { return format.empty() ? std::string(def) : format; };
    auto unsupported = [&](const std::string& f, const char* cmd) -> Error {
        return Error(std::string("unsupported format for ") + cmd + ": " + f);
    };

    if (cmd_orbit->parsed()) {
        const auto& o = cfg.at("orbit");
        const auto& s = cfg.at("system");
        const kepler::Orbit orb(s.at("a").get<double>(), s.at("e").get<double>());
        const int n = o.at("samples").get<int>();
        const double t0 = o.at("t_min").get<double>(), t1 = o.at("t_max").get<double>();
        std::vector<double> times(n);
        for (int i = 0; i < n; ++i)
            times[i] = n == 1 ? t0 : t0 + (t1 - t0) * i / (n - 1);
        const std::string f = pick("csv");
        std::ostringstream os;
        if (f == "csv")
            io::write_orbit_csv(os, orb, times);
        else if (f == "json")
            os << dump(io::orbit_to_json(orb, times));
        else
            throw unsupported(f, "orbit");
        out.write(os.str());
    } else if (cmd_lambdas->parsed()) {
        const auto p = params_from(cfg);
        const auto ls = potential::build_lambda_set(p);
        const std::string f = pick("json");
        std::ostringstream os;
        if (f == "json") {
            json j = io::lambda_set_to_json(ls);
            j["params"] = io::params_to_json(p);
            os << dump(j);
        } else if (f == "csv") {
            io::write_lambda_set_csv(os, ls);
        } else {
            throw unsupported(f, "lambdas");
        }
        out.write(os.str());
    } else if (cmd_conditions->parsed()) {
        const auto p = params_from(cfg);
        const auto ls = potential::build_lambda_set(p);
        const auto u = conditions::check_uniqueness(p, ls);
        const auto l = conditions::check_linear_stability(p, ls);
        const std::string f = pick("json");
        std::ostringstream os;
        if (f == "json") {
            json j = io::conditions_to_json(u, l);
            j["params"] = io::params_to_json(p);
            os << dump(j);
        } else if (f == "csv") {
            io::write_csv(os,
                          {"unique", "margin_unique", "stable", "margin1", "margin2",
                           "margin3", "m_bound"},
                          {{u.holds ? "1" : "0", io::format_double(u.margin),
                            l.all ? "1" : "0", io::format_double(l.margin1),
                            io::format_double(l.margin2), io::format_double(l.margin3),
                            io::format_double(l.m)}});
        } else {
            throw unsupported(f, "conditions");
        }
        out.write(os.str());
    } else if (cmd_periodic->parsed()) {
        const auto p = params_from(cfg);
        const auto ls = potential::build_lambda_set(p);
        const auto sol = solve_from(cfg, p, ls);
        const int samples = cfg.at("periodic").at("samples").get<int>();
        const std::string f = pick("csv");
        std::ostringstream os;
        if (f == "csv")
            io::write_periodic_csv(os, sol, samples);
        else if (f == "json")
            os << dump(io::periodic_to_json(sol, samples));
        else if (f == "svg")
            io::write_periodic_svg(os, sol);
        else
            throw unsupported(f, "periodic");
        out.write(os.str());
    } else if (cmd_floquet->parsed()) {
        const auto p = params_from(cfg);
        const auto ls = potential::build_lambda_set(p);
        const auto sol = solve_from(cfg, p, ls);
        const auto flo = solver::monodromy(p, ls, sol.delta, sol, floquet_from(cfg));
        const std::string f = pick("json");
        if (f != "json") throw unsupported(f, "floquet");
        json j = io::floquet_to_json(flo);
        j["solution"] = {{"x0", {sol.x0[0], sol.x0[1]}},
                         {"v0", {sol.v0[0], sol.v0[1]}},
                         {"delta", {sol.delta.delta1, sol.delta.delta2}},
                         {"amplitude", sol.amplitude},
                         {"residual", sol.residual}};
        out.write(dump(j));
    } else if (cmd_scan->parsed()) {
        const auto& s = cfg.at("scan");
        scan::DiagramRequest req;
        const std::string geom = s.at("geometry").get<std::string>();
        if (geom == "equal-bodies")
            req.geometry = scan::Geometry::EqualBodies;
        else if (geom == "two-to-one")
            req.geometry = scan::Geometry::TwoToOne;
        else
            throw DomainError("scan.geometry must be equal-bodies or two-to-one");
        req.qhat = s.at("qhat").get<double>();
        req.e_values = scan::make_grid(s.at("e_min").get<double>(),
                                       s.at("e_max").get<double>(),
                                       s.at("e_count").get<int>());
        req.lambda_values = scan::make_grid(s.at("lambda_min").get<double>(),
                                            s.at("lambda_max").get<double>(),
                                            s.at("lambda_count").get<int>());
        req.delta = delta_from(cfg);
        req.solver_options = solver_from(cfg);
        req.floquet_options = floquet_from(cfg);
        req.continuation_options = continuation_from(cfg);
        req.threads = s.at("threads").get<int>();
        const auto diagram = scan::compute_diagram(req);
        const std::string f = pick("csv");
        std::ostringstream os;
        if (f == "csv")
            io::write_scan_csv(os, diagram);
        else if (f == "json")
            os << dump(io::scan_to_json(diagram));
        else if (f == "svg")
            io::write_scan_svg(os, diagram);
        else
            throw unsupported(f, "scan");
        out.write(os.str());
    } else if (cmd_stokes->parsed()) {
        const auto& st = cfg.at("stokes");
        const auto body = body_from(cfg.at("bodies").at(st.at("body").get<std::string>()));
        const int lmax = st.at("max_degree").get<int>();
        const bool quad = st.at("use_quadrature").get<bool>();
        json rows = json::array();
        std::vector<std::vector<std::string>> csv_rows;
        for (int l = 0; l <= lmax; l += 2)
            for (int m = 0; m <= l; m += 2) {
                const double v = quad ? bodies::stokes_quadrature(body, l, m)
                                      : bodies::stokes_closed_form(body, l, m);
                rows.push_back({{"l", l}, {"m", m}, {"value", v}});
                csv_rows.push_back(
                    {std::to_string(l), std::to_string(m), io::format_double(v)});
            }
        const std::string f = pick("json");
        std::ostringstream os;
        if (f == "json")
            os << dump(json{{"mass", body.mass},
                            {"mean_radius", body.mean_radius()},
                            {"coefficients", rows}});
        else if (f == "csv")
            io::write_csv(os, {"l", "m", "value"}, csv_rows);
        else
            throw unsupported(f, "stokes");
        out.write(os.str());
    } else if (cmd_full->parsed()) {
        const auto& fm = cfg.at("full_model");
        auto [b1, b2] = bodies::normalize_pair(body_from(cfg.at("bodies").at("body1")),
                                               body_from(cfg.at("bodies").at("body2")));
        const dynamics::FullModel model(b1, b2, fm.at("a_ref").get<double>(),
                                        fm.at("keplerian_orbital_part").get<bool>());
        Eigen::Matrix<double, 8, 1> y;
        if (fm.at("state").is_array()) {
            for (int i = 0; i < 8; ++i) y[i] = fm.at("state").at(i).get<double>();
        } else {
            // double synchronous state on a circular orbit of radius a_ref
            const double r = fm.at("a_ref").get<double>();
            const double fdot = std::sqrt(model.G / (r * r * r));
            y << r, 0.0, 0.0, fdot, 0.0, fdot, 0.0, fdot;
        }
        auto rhs = [&](double, const Eigen::Matrix<double, 8, 1>& v) {
            dynamics::FullState st{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
            const auto d = dynamics::rhs_full_lagrangian(model, st);
            Eigen::Matrix<double, 8, 1> dv;
            dv << d.r, d.r_dot, d.f, d.f_dot, d.theta1, d.theta1_dot, d.theta2,
                d.theta2_dot;
            return dv;
        };
        const double t1 = fm.at("t_max").get<double>();
        const int samples = fm.at("samples").get<int>();
        const auto traj = integrate::integrate_dense<8>(rhs, 0.0, y, t1, integrator_from(cfg));
        auto state_at = [&](double t) {
            const auto v = traj(t);
            return dynamics::FullState{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
        };
        const auto st0 = state_at(0.0);
        const double E0 = dynamics::full_energy(model, st0);
        const double L0 = dynamics::full_angular_momentum(model, st0);
        auto rel = [](double v, double v0) {
            return std::abs(v - v0) / std::max(std::abs(v0), 1e-300);
        };
        const std::string f = pick("csv");
        std::ostringstream os;
        if (f == "csv") {
            std::vector<std::vector<std::string>> rows;
            for (int i = 0; i <= samples; ++i) {
                const double t = t1 * i / samples;
                const auto st = state_at(t);
                const double E = dynamics::full_energy(model, st);
                const double L = dynamics::full_angular_momentum(model, st);
                rows.push_back({io::format_double(t), io::format_double(st.r),
                                io::format_double(st.r_dot), io::format_double(st.f),
                                io::format_double(st.f_dot), io::format_double(st.theta1),
                                io::format_double(st.theta1_dot),
                                io::format_double(st.theta2),
                                io::format_double(st.theta2_dot), io::format_double(E),
                                io::format_double(L), io::format_double(rel(E, E0)),
                                io::format_double(rel(L, L0))});
            }
            io::write_csv(os,
                          {"t", "r", "r_dot", "f", "f_dot", "theta1", "theta1_dot",
                           "theta2", "theta2_dot", "energy", "angular_momentum",
                           "energy_drift", "angular_momentum_drift"},
                          rows);
        } else if (f == "json") {
            json jrows = json::array();
            double emax = 0.0, lmax = 0.0;
            for (int i = 0; i <= samples; ++i) {
                const double t = t1 * i / samples;
                const auto st = state_at(t);
                const double E = dynamics::full_energy(model, st);
                const double L = dynamics::full_angular_momentum(model, st);
                emax = std::max(emax, rel(E, E0));
                lmax = std::max(lmax, rel(L, L0));
                jrows.push_back({{"t", t},
                                 {"r", st.r},
                                 {"r_dot", st.r_dot},
                                 {"f", st.f},
                                 {"f_dot", st.f_dot},
                                 {"theta1", st.theta1},
                                 {"theta1_dot", st.theta1_dot},
                                 {"theta2", st.theta2},
                                 {"theta2_dot", st.theta2_dot},
                                 {"energy", E},
                                 {"angular_momentum", L}});
            }
            os << dump(json{{"keplerian_orbital_part", model.keplerian_orbital_part},
                            {"G", model.G},
                            {"energy_drift", emax},
                            {"angular_momentum_drift", lmax},
                            {"samples", jrows}});
        } else {
            throw unsupported(f, "full-model");
        }
        out.write(os.str());
    } else if (cmd_units->parsed()) {
        const auto& u = cfg.at("units");
        const bodies::UnitSystem us(u.at("period").get<double>(),
                                    u.at("total_mass").get<double>(),
                                    u.at("total_inertia").get<double>());
        const std::string name = u.at("unit").get<std::string>();
        bodies::Unit unit;
        if (name == "time")
            unit = bodies::Unit::Time;
        else if (name == "mass")
            unit = bodies::Unit::Mass;
        else if (name == "length")
            unit = bodies::Unit::Length;
        else if (name == "inertia")
            unit = bodies::Unit::MomentOfInertia;
        else
            throw DomainError("units.unit must be time, mass, length or inertia");
        const bodies::Quantity q{u.at("value").get<double>(), unit};
        const std::string dir = u.at("direction").get<std::string>();
        bodies::Quantity r{0.0, unit};
        if (dir == "to-model")
            r = bodies::to_model_units(us, q);
        else if (dir == "from-model")
            r = bodies::from_model_units(us, q);
        else
            throw DomainError("units.direction must be to-model or from-model");
        const std::string f = pick("json");
        if (f != "json") throw unsupported(f, "convert-units");
        out.write(dump(json{{"value", q.value},
                            {"unit", name},
                            {"direction", dir},
                            {"converted", r.value}}));
    }
    return 0;
}

json error_json(const char* type, const std::string& message) {
    return json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UnsupportedDegreeError& ex) {
        std::cerr << error_json("unsupported_degree", ex.what()).dump(2) << "\n";
    } catch (const InconsistentParametersError& ex) {
        std::cerr << error_json("inconsistent_parameters", ex.what()).dump(2) << "\n";
    } catch (const ContinuationBlockedError& ex) {
        std::cerr << error_json("continuation_blocked", ex.what()).dump(2) << "\n";
    } catch (const ContinuationStalledError& ex) {
        std::cerr << error_json("continuation_stalled", ex.what()).dump(2) << "\n";
    } catch (const NoConvergenceError& ex) {
        std::cerr << error_json("no_convergence", ex.what()).dump(2) << "\n";
    } catch (const StiffnessError& ex) {
        std::cerr << error_json("stiffness", ex.what()).dump(2) << "\n";
    } catch (const DomainError& ex) {
        std::cerr << error_json("domain_error", ex.what()).dump(2) << "\n";
    } catch (const Error& ex) {
        std::cerr << error_json("error", ex.what()).dump(2) << "\n";
    } catch (const json::exception& ex) {
        std::cerr << error_json("config_error", ex.what()).dump(2) << "\n";
    } catch (const std::exception& ex) {
        std::cerr << error_json("internal_error", ex.what()).dump(2) << "\n";
    }
    return 1;
}
