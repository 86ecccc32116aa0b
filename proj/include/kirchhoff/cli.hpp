#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kirchhoff/asymptotics.hpp"
#include "kirchhoff/fiber.hpp"
#include "kirchhoff/limit_profiles.hpp"
#include "kirchhoff/solver.hpp"

namespace kirchhoff::cli {

using Json = nlohmann::ordered_json;

// exit codes: 0 success, 1 validation error, 2 numerical failure
struct ValidationError {
    std::string key;
    std::string message;
};
struct NumericalError {
    std::string diagnostic;
    std::string message;
};

// Single-file key-value config: one `key = value` per line, `#` comments,
// blank lines ignored. Flags override file keys.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError{"config", "cannot open config file: " + path};
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError{"config",
                                  "line " + std::to_string(lineno) + " is not `key = value`"};
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!val.empty() && val.front() == '"' && val.back() == '"' && val.size() >= 2)
            val = val.substr(1, val.size() - 2);
        if (key.empty()) throw ValidationError{"config", "empty key on line " + std::to_string(lineno)};
        kv[key] = val;
    }
    return kv;
}

namespace detail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "command", "N",     "a",     "b",       "family", "p",     "A",      "alpha",
        "B",       "beta",  "c",     "c_list",  "R",      "M",     "tol",    "max_iter",
        "out",     "jobs",  "t_min", "t_max",   "samples", "m",    "K",      "q",
        "input"};
    return keys;
}

inline double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                        std::optional<double> fallback = std::nullopt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ValidationError{key, "missing required key"};
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError{key, "not a number: " + it->second};
    }
}

inline long to_long(const std::map<std::string, std::string>& kv, const std::string& key,
                    std::optional<long> fallback = std::nullopt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ValidationError{key, "missing required key"};
    }
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError{key, "not an integer: " + it->second};
    }
}

inline std::vector<double> to_double_list(const std::map<std::string, std::string>& kv,
                                          const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError{key, "missing required key"};
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ValidationError{key, "not a number in list: " + tok};
        }
    }
    if (out.empty()) throw ValidationError{key, "empty list"};
    return out;
}

}  // namespace detail

struct RunConfig {
    std::string command;
    int dim = 3;
    NonlinearitySpec spec;
    std::vector<double> c_list; // single c for solve/fiber-scan
    double tol = 0.0;           // 0 = module default
    long max_iter = 0;
    double radius = 0.0;
    int nodes = 0;
    int jobs = 1;
    std::string out = "run";
    // fiber-scan
    double t_min = 0.25, t_max = 4.0;
    int samples = 101;
    std::string input; // optional snapshot to scan instead of the seed field
    // limit-profile
    double m = 1.0, K = 1.0, q = 4.0;
    std::map<std::string, std::string> resolved; // echoed into artifacts
};

inline RunConfig build_config(const std::string& command,
                              const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv)
        if (!detail::known_keys().count(key)) throw ValidationError{key, "unknown config key"};

    RunConfig cfg;
    cfg.command = command;
    cfg.dim = static_cast<int>(detail::to_long(kv, "N", 3));
    if (cfg.dim < 1 || cfg.dim > 3) throw ValidationError{"N", "dimension must be 1, 2 or 3"};

    const bool needs_spec =
        command == "solve" || command == "sweep" || command == "fiber-scan" || command == "check";
    if (needs_spec) {
        const double a = detail::to_double(kv, "a", 1.0);
        const double b = detail::to_double(kv, "b", 1.0);
        std::string family = kv.count("family") ? kv.at("family") : "power";
        if (family == "power") {
            cfg.spec = pure_power(a, b, detail::to_double(kv, "p"));
        } else if (family == "two_power") {
            cfg.spec = two_power(a, b, detail::to_double(kv, "A"), detail::to_double(kv, "alpha"),
                                 detail::to_double(kv, "B"), detail::to_double(kv, "beta"));
        } else {
            throw ValidationError{"family", "must be \"power\" or \"two_power\""};
        }
        if (!(cfg.spec.a > 0.0)) throw ValidationError{"a", "must be positive"};
        if (!(cfg.spec.b > 0.0)) throw ValidationError{"b", "must be positive"};
    }

    if (command == "sweep") {
        cfg.c_list = detail::to_double_list(kv, "c_list");
        for (double c : cfg.c_list)
            if (!(c > 0.0)) throw ValidationError{"c_list", "masses must be positive"};
    } else if (command == "solve" || command == "fiber-scan") {
        const double c = detail::to_double(kv, "c", 1.0);
        if (!(c > 0.0)) throw ValidationError{"c", "mass must be positive"};
        cfg.c_list = {c};
    }

    cfg.tol = detail::to_double(kv, "tol", 0.0);
    if (cfg.tol < 0.0) throw ValidationError{"tol", "must be nonnegative"};
    cfg.max_iter = detail::to_long(kv, "max_iter", 0);
    cfg.radius = detail::to_double(kv, "R", 0.0);
    cfg.nodes = static_cast<int>(detail::to_long(kv, "M", 0));
    if (cfg.nodes != 0 && cfg.nodes < 64) throw ValidationError{"M", "need at least 64 nodes"};
    cfg.jobs = static_cast<int>(detail::to_long(kv, "jobs", 1));
    if (cfg.jobs < 1) throw ValidationError{"jobs", "must be >= 1"};
    if (kv.count("out")) cfg.out = kv.at("out");

    cfg.t_min = detail::to_double(kv, "t_min", 0.25);
    cfg.t_max = detail::to_double(kv, "t_max", 4.0);
    if (!(cfg.t_min > 0.0) || !(cfg.t_max > cfg.t_min))
        throw ValidationError{"t_min", "need 0 < t_min < t_max"};
    cfg.samples = static_cast<int>(detail::to_long(kv, "samples", 101));
    if (cfg.samples < 2) throw ValidationError{"samples", "need at least 2 samples"};
    if (kv.count("input")) cfg.input = kv.at("input");

    if (command == "limit-profile") {
        cfg.m = detail::to_double(kv, "m", 1.0);
        cfg.K = detail::to_double(kv, "K", 1.0);
        cfg.q = detail::to_double(kv, "q");
        if (!(cfg.m > 0.0)) throw ValidationError{"m", "must be positive"};
        if (!(cfg.K > 0.0)) throw ValidationError{"K", "must be positive"};
        if (!(cfg.q > 2.0) || (cfg.dim == 3 && !(cfg.q < 6.0)))
            throw ValidationError{"q", "exponent outside the subcritical window"};
    }

    cfg.resolved = kv;
    cfg.resolved["command"] = command;
    return cfg;
}

namespace detail {

inline std::string out_path(const RunConfig& cfg, const std::string& suffix) {
    std::string base = cfg.out;
    const bool absolute = !base.empty() && base.front() == '/';
    if (!absolute) {
        if (const char* dir = std::getenv("KIRCHHOFF_OUT_DIR"); dir && *dir)
            base = std::string(dir) + "/" + base;
    }
    return base + suffix;
}

inline Json config_json(const RunConfig& cfg) {
    Json j = Json::object();
    for (const auto& [k, v] : cfg.resolved) j[k] = v;
    return j;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw NumericalError{"io", "cannot write " + path};
    os << text;
}

inline SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions opts;
    if (cfg.tol > 0.0) {
        opts.tol_pde = cfg.tol;
        opts.tol_p = cfg.tol;
        opts.tol_nehari = cfg.tol;
    }
    if (cfg.max_iter > 0) opts.max_iter = cfg.max_iter;
    if (cfg.radius > 0.0) opts.radius = cfg.radius;
    if (cfg.nodes > 0) opts.nodes = cfg.nodes;
    return opts;
}

inline Json ground_state_json(const GroundState& gs) {
    Json j;
    j["lambda"] = gs.lambda;
    j["M"] = gs.energy;
    j["c"] = gs.c;
    j["d"] = gs.gradsq;
    j["residuals"] = {{"pohozaev", gs.diag.pohozaev_res},
                      {"nehari", gs.diag.nehari_res},
                      {"pde_sup", gs.diag.pde_res_sup}};
    j["iterations"] = gs.diag.iterations;
    j["grid"] = {{"R", gs.diag.radius}, {"M", gs.diag.nodes}, {"regrids", gs.diag.regrids}};
    return j;
}

inline int cmd_check(const RunConfig& cfg) {
    const AssumptionReport rep = check_assumptions(cfg.spec, cfg.dim);
    Json j;
    j["pass"] = rep.pass;
    j["items"] = {{"G1", rep.item[0]}, {"G2", rep.item[1]}, {"G3", rep.item[2]},
                  {"G4", rep.item[3]}, {"G5", rep.item[4]}};
    j["message"] = rep.message;
    if (!rep.pass) j["first_failure"] = rep.first_failure();
    j["config"] = config_json(cfg);
    write_text(out_path(cfg, ".json"), j.dump(2) + "\n");
    if (!rep.pass) throw ValidationError{rep.first_failure(), rep.message};
    return 0;
}

inline int cmd_solve(const RunConfig& cfg) {
    const GroundState gs = solve_ground_state(cfg.dim, cfg.spec, cfg.c_list.at(0),
                                              solve_options(cfg));
    write_snapshot(out_path(cfg, ".snapshot"), gs.u);
    Json j = ground_state_json(gs);
    j["config"] = config_json(cfg);
    write_text(out_path(cfg, ".json"), j.dump(2) + "\n");
    return 0;
}

inline int cmd_limit_profile(const RunConfig& cfg) {
    LimitProfileOptions opts;
    if (cfg.radius > 0.0) opts.radius = cfg.radius;
    if (cfg.nodes > 0) opts.nodes = cfg.nodes;
    if (cfg.tol > 0.0) opts.tol = cfg.tol;
    const LimitProfile prof = solve_limit_profile(cfg.dim, cfg.m, cfg.K, cfg.q, opts);
    write_snapshot(out_path(cfg, ".snapshot"), prof.w);
    Json j;
    j["N"] = prof.dim;
    j["m"] = prof.m;
    j["K"] = prof.K;
    j["q"] = prof.q;
    j["center"] = prof.center;
    j["mass"] = prof.mass;
    j["kinetic"] = prof.kinetic;
    j["residual_sup"] = prof.residual_sup;
    j["config"] = config_json(cfg);
    write_text(out_path(cfg, ".json"), j.dump(2) + "\n");
    return 0;
}

inline int cmd_fiber_scan(const RunConfig& cfg) {
    Field u = [&] {
        if (!cfg.input.empty()) return read_snapshot(cfg.input);
        const double radius = cfg.radius > 0.0 ? cfg.radius : 20.0;
        const int nodes = cfg.nodes > 0 ? cfg.nodes : 4097;
        auto grid = build_grid(cfg.dim, radius, nodes);
        return Field::sample(grid, [](double r) { return std::exp(-0.5 * r * r); });
    }();
    {
        const double mass = norms(u).mass;
        if (!(mass > 0.0)) throw ValidationError{"input", "snapshot has zero mass"};
        const double s = std::sqrt(cfg.c_list.at(0) / mass);
        for (double& x : u.v) x *= s;
    }
    const FiberScan scan = fiber_scan(cfg.spec, u, cfg.t_min, cfg.t_max, cfg.samples);
    std::ostringstream os;
    os.precision(17);
    os << "t,I_t,P_t\n";
    for (std::size_t k = 0; k < scan.t.size(); ++k)
        os << scan.t[k] << ',' << scan.I[k] << ',' << scan.P[k] << '\n';
    os << "# config = " << config_json(cfg).dump() << '\n';
    write_text(out_path(cfg, ".csv"), os.str());
    return 0;
}

inline int cmd_sweep(const RunConfig& cfg) {
    SweepOptions opts;
    opts.solve = solve_options(cfg);
    const SweepResult res = sweep(cfg.dim, cfg.spec, cfg.c_list, opts);

    std::ostringstream os;
    os << sweep_csv_header() << '\n';
    for (const auto& rec : res.records) os << sweep_csv_row(rec) << '\n';
    os << "# config = " << config_json(cfg).dump() << '\n';
    write_text(out_path(cfg, ".csv"), os.str());

    Json j;
    j["trend"] = {{"mass_endpoints", res.trend.mass_endpoints},
                  {"multiplier_endpoints", res.trend.multiplier_endpoints},
                  {"center_endpoints", res.trend.center_endpoints},
                  {"gradient_endpoints", res.trend.gradient_endpoints},
                  {"dist_U_trend", res.trend.dist_U_trend},
                  {"dist_V_trend", res.trend.dist_V_trend},
                  {"continuity", res.trend.continuity},
                  {"comparability_band", res.trend.comparability_band}};
    j["failures"] = res.trend.failures;
    j["all_solved"] = res.all_solved;
    j["config"] = config_json(cfg);
    write_text(out_path(cfg, ".trend.json"), j.dump(2) + "\n");

    if (!res.all_solved) {
        std::string failed;
        for (const auto& rec : res.records)
            if (!rec.solved) failed += (failed.empty() ? "" : "; ") +
                                       std::to_string(rec.c) + ": " + rec.error;
        throw NumericalError{"sweep", "unsolved masses: " + failed};
    }
    return 0;
}

inline void write_error_json(const RunConfig* cfg, const std::string& stage,
                             const std::string& key, const std::string& message) {
    Json j;
    j["stage"] = stage;
    j["key"] = key;
    j["message"] = message;
    std::string path = "error.json";
    if (cfg) {
        path = out_path(*cfg, ".error.json");
    } else if (const char* dir = std::getenv("KIRCHHOFF_OUT_DIR"); dir && *dir) {
        path = std::string(dir) + "/error.json";
    }
    std::ofstream os(path);
    if (os) os << j.dump(2) << '\n';
}

}  // namespace detail

// In-process entry point; argv-style arguments without the program name.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"Kirchhoff normalized ground states"};
    app.require_subcommand(1);

    std::map<std::string, std::string> flags;
    std::string config_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key-value config file");
        for (const auto& key : detail::known_keys()) {
            if (key == "command") continue;
            std::string flag = "--" + key;
            sub->add_option_function<std::string>(
                flag, [&flags, key](const std::string& v) { flags[key] = v; });
        }
    };
    CLI::App* sub_solve = app.add_subcommand("solve", "compute one ground state");
    CLI::App* sub_sweep = app.add_subcommand("sweep", "ground states across a mass list");
    CLI::App* sub_fiber = app.add_subcommand("fiber-scan", "scan I and P along the dilation fiber");
    CLI::App* sub_limit = app.add_subcommand("limit-profile", "radial ground state of -m Dw + w = K w^{q-1}");
    CLI::App* sub_check = app.add_subcommand("check", "validate the nonlinearity assumptions");
    for (CLI::App* sub : {sub_solve, sub_sweep, sub_fiber, sub_limit, sub_check}) add_common(sub);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        detail::write_error_json(nullptr, "argv", "usage", e.what());
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::optional<RunConfig> cfg;
    try {
        std::map<std::string, std::string> kv;
        if (!config_path.empty()) kv = parse_config_file(config_path);
        for (const auto& [k, v] : flags) kv[k] = v; // flags override file keys
        cfg = build_config(command, kv);
        if (command == "check") return detail::cmd_check(*cfg);
        if (command == "solve") return detail::cmd_solve(*cfg);
        if (command == "sweep") return detail::cmd_sweep(*cfg);
        if (command == "fiber-scan") return detail::cmd_fiber_scan(*cfg);
        if (command == "limit-profile") return detail::cmd_limit_profile(*cfg);
        detail::write_error_json(nullptr, "argv", "command", "unknown subcommand " + command);
        return 1;
    } catch (const ValidationError& e) {
        detail::write_error_json(cfg ? &*cfg : nullptr, "validation", e.key, e.message);
        std::fprintf(stderr, "validation error [%s]: %s\n", e.key.c_str(), e.message.c_str());
        return 1;
    } catch (const std::invalid_argument& e) {
        detail::write_error_json(cfg ? &*cfg : nullptr, "validation", "input", e.what());
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 1;
    } catch (const NumericalError& e) {
        detail::write_error_json(cfg ? &*cfg : nullptr, "numerical", e.diagnostic, e.message);
        std::fprintf(stderr, "numerical failure [%s]: %s\n", e.diagnostic.c_str(),
                     e.message.c_str());
        return 2;
    } catch (const std::exception& e) {
        detail::write_error_json(cfg ? &*cfg : nullptr, "numerical", "solver", e.what());
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
}

}  // namespace kirchhoff::cli
