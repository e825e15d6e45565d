// Run configuration (flat key=value files plus flag overrides) and the
// subcommand driver behind tools/eqcm.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqcm/correlations.hpp"
#include "eqcm/ed.hpp"
#include "eqcm/fermions.hpp"
#include "eqcm/io.hpp"
#include "eqcm/model.hpp"
#include "eqcm/scan.hpp"

namespace eqcm {

enum class Command { spectrum, point, sweep, scan2d, classify, verify };

inline constexpr std::array kCommands{Command::spectrum, Command::point,    Command::sweep,
                                      Command::scan2d,   Command::classify, Command::verify};

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::spectrum: return "spectrum";
        case Command::point: return "point";
        case Command::sweep: return "sweep";
        case Command::scan2d: return "scan2d";
        case Command::classify: return "classify";
        case Command::verify: return "verify";
    }
    return "?";
}

inline std::optional<Command> parse_command(std::string_view s) {
    for (Command c : kCommands)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

struct ConfigError : std::runtime_error {
    enum class Kind { malformed_numeric, unknown_key, missing_subcommand, invalid_value, syntax };
    Kind kind;
    std::string key;

    ConfigError(Kind k, std::string key_name, const std::string& msg)
        : std::runtime_error(msg), kind(k), key(std::move(key_name)) {}
};

struct RunConfig {
    std::optional<Command> command;
    ModelParams model;

    // 1D path: params(t) = model + t * slope
    Direction slope{0, 0, 0, 0, 0};
    double t_min = 0.0;
    double t_max = 1.0;
    int samples = 101;
    BondKind bond = BondKind::odd;

    // 2D grid: params(x, y) = model + x * x_slope + y * y_slope
    Direction x_slope{1, 0, 0, 0, 0};
    Direction y_slope{0, 1, 0, 0, 0};
    double x_min = -1.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;
    int nx = 64, ny = 64;
    Axis axis = Axis::x;

    Quantity quantity = Quantity::discord;
    OutputFormat format = OutputFormat::table;
    std::string output = "-";

    bool verify_ed = true;
    bool verify_povm = true;
    Thresholds thresholds;
    int refine = 2;
    int threads = 0;
    MeasureOptions measure;

    SweepSpec sweep_spec() const {
        SweepSpec s;
        s.base = model;
        s.slope = slope;
        s.t_min = t_min;
        s.t_max = t_max;
        s.samples = samples;
        s.bond = bond;
        s.measure = measure;
        s.threads = threads;
        return s;
    }

    Scan2DSpec scan_spec() const {
        Scan2DSpec s;
        s.base = model;
        s.x_slope = x_slope;
        s.y_slope = y_slope;
        s.x_min = x_min;
        s.x_max = x_max;
        s.y_min = y_min;
        s.y_max = y_max;
        s.nx = nx;
        s.ny = ny;
        s.bond = bond;
        s.quantity = quantity;
        s.axis = axis;
        s.measure = measure;
        s.threads = threads;
        return s;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, std::string_view text) {
    const std::string v = trim(text);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(ConfigError::Kind::malformed_numeric, key,
                          "malformed numeric value for '" + key + "': '" + v + "'");
    }
    return out;
}

inline int parse_int(const std::string& key, std::string_view text) {
    const std::string v = trim(text);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(ConfigError::Kind::malformed_numeric, key,
                          "malformed integer value for '" + key + "': '" + v + "'");
    }
    return out;
}

inline bool parse_bool(const std::string& key, std::string_view text) {
    const std::string v = trim(text);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(ConfigError::Kind::invalid_value, key, "expected a boolean for '" + key + "': '" + v + "'");
}

inline Direction parse_direction(const std::string& key, std::string_view text) {
    Direction d{};
    std::size_t i = 0;
    std::string v = trim(text);
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (i >= d.size()) break;
        d[i++] = parse_double(key, part);
    }
    if (i != d.size() || std::count(v.begin(), v.end(), ',') != 4) {
        throw ConfigError(ConfigError::Kind::invalid_value, key,
                          "'" + key + "' needs five comma-separated values (dj1,dj2,dl1,dl2,dh)");
    }
    return d;
}

inline std::string join_direction(const Direction& d) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + format_number(d[i]);
    return s;
}

}  // namespace detail

struct ConfigKey {
    std::string name;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys() {
    using namespace detail;
    auto num = [](std::string name, std::string help, auto member) {
        return ConfigKey{name, std::move(help),
                         [member, name](RunConfig& c, const std::string& v) { member(c) = parse_double(name, v); },
                         [member](const RunConfig& c) { return format_number(member(c)); }};
    };
    auto integer = [](std::string name, std::string help, auto member) {
        return ConfigKey{name, std::move(help),
                         [member, name](RunConfig& c, const std::string& v) { member(c) = parse_int(name, v); },
                         [member](const RunConfig& c) { return std::to_string(member(c)); }};
    };
    auto flag = [](std::string name, std::string help, auto member) {
        return ConfigKey{name, std::move(help),
                         [member, name](RunConfig& c, const std::string& v) { member(c) = parse_bool(name, v); },
                         [member](const RunConfig& c) {
                             return std::string(member(c) ? "1" : "0");
                         }};
    };
    auto dir = [](std::string name, std::string help, auto member) {
        return ConfigKey{name, std::move(help),
                         [member, name](RunConfig& c, const std::string& v) { member(c) = parse_direction(name, v); },
                         [member](const RunConfig& c) { return join_direction(member(c)); }};
    };

    static const std::vector<ConfigKey> keys = {
        {"command", "subcommand: spectrum | point | sweep | scan2d | classify | verify",
         [](RunConfig& c, const std::string& v) {
             const auto cmd = parse_command(trim(v));
             if (!cmd) throw ConfigError(ConfigError::Kind::invalid_value, "command", "unknown subcommand '" + v + "'");
             c.command = cmd;
         },
         [](const RunConfig& c) { return c.command ? std::string(to_string(*c.command)) : std::string(); }},
        num("j1", "odd-bond x coupling", [](auto& c) -> auto& { return c.model.j1; }),
        num("j2", "odd-bond y coupling", [](auto& c) -> auto& { return c.model.j2; }),
        num("l1", "even-bond x coupling", [](auto& c) -> auto& { return c.model.l1; }),
        num("l2", "even-bond y coupling", [](auto& c) -> auto& { return c.model.l2; }),
        num("h", "transverse field", [](auto& c) -> auto& { return c.model.h; }),
        integer("n_cells", "number of two-site unit cells (N = 2 n_cells)",
                [](auto& c) -> auto& { return c.model.n_cells; }),
        {"bond", "odd | even",
         [](RunConfig& c, const std::string& v) {
             const auto s = trim(v);
             if (s == "odd") c.bond = BondKind::odd;
             else if (s == "even") c.bond = BondKind::even;
             else throw ConfigError(ConfigError::Kind::invalid_value, "bond", "bond must be odd or even, got '" + s + "'");
         },
         [](const RunConfig& c) { return std::string(to_string(c.bond)); }},
        dir("slope", "sweep direction dj1,dj2,dl1,dl2,dh", [](auto& c) -> auto& { return c.slope; }),
        num("t_min", "sweep start", [](auto& c) -> auto& { return c.t_min; }),
        num("t_max", "sweep end", [](auto& c) -> auto& { return c.t_max; }),
        integer("samples", "sweep sample count (>= 16)", [](auto& c) -> auto& { return c.samples; }),
        dir("x_slope", "scan2d x direction", [](auto& c) -> auto& { return c.x_slope; }),
        dir("y_slope", "scan2d y direction", [](auto& c) -> auto& { return c.y_slope; }),
        num("x_min", "scan2d x start", [](auto& c) -> auto& { return c.x_min; }),
        num("x_max", "scan2d x end", [](auto& c) -> auto& { return c.x_max; }),
        num("y_min", "scan2d y start", [](auto& c) -> auto& { return c.y_min; }),
        num("y_max", "scan2d y end", [](auto& c) -> auto& { return c.y_max; }),
        integer("nx", "scan2d x points", [](auto& c) -> auto& { return c.nx; }),
        integer("ny", "scan2d y points", [](auto& c) -> auto& { return c.ny; }),
        {"axis", "scan2d derivative axis: x | y",
         [](RunConfig& c, const std::string& v) {
             const auto s = trim(v);
             if (s == "x") c.axis = Axis::x;
             else if (s == "y") c.axis = Axis::y;
             else throw ConfigError(ConfigError::Kind::invalid_value, "axis", "axis must be x or y, got '" + s + "'");
         },
         [](const RunConfig& c) { return std::string(c.axis == Axis::x ? "x" : "y"); }},
        {"quantity", "quantity for scan2d / classify",
         [](RunConfig& c, const std::string& v) {
             const auto q = parse_quantity(trim(v));
             if (!q) throw ConfigError(ConfigError::Kind::invalid_value, "quantity", "unknown quantity '" + v + "'");
             c.quantity = *q;
         },
         [](const RunConfig& c) { return std::string(quantity_name(c.quantity)); }},
        {"format", "table | jsonl",
         [](RunConfig& c, const std::string& v) {
             const auto s = trim(v);
             if (s == "table") c.format = OutputFormat::table;
             else if (s == "jsonl") c.format = OutputFormat::jsonl;
             else throw ConfigError(ConfigError::Kind::invalid_value, "format", "format must be table or jsonl, got '" + s + "'");
         },
         [](const RunConfig& c) { return std::string(to_string(c.format)); }},
        {"output", "output path, - for stdout",
         [](RunConfig& c, const std::string& v) { c.output = trim(v); },
         [](const RunConfig& c) { return c.output; }},
        flag("verify_ed", "verify: run the exact-diagonalisation cross-check",
             [](auto& c) -> auto& { return c.verify_ed; }),
        flag("verify_povm", "verify: run the measurement-optimisation cross-check",
             [](auto& c) -> auto& { return c.verify_povm; }),
        num("jump_threshold", "classify jump threshold, 0 = automatic",
            [](auto& c) -> auto& { return c.thresholds.jump; }),
        num("peak_threshold", "classify derivative-peak threshold, 0 = automatic",
            [](auto& c) -> auto& { return c.thresholds.peak; }),
        integer("refine", "classify refinement factor (>= 2)", [](auto& c) -> auto& { return c.refine; }),
        integer("threads", "worker threads, 0 = all cores", [](auto& c) -> auto& { return c.threads; }),
        flag("numeric", "also maximise the classical correlation numerically",
             [](auto& c) -> auto& { return c.measure.numeric; }),
        integer("grid", "angular grid per axis for the numeric maximiser (>= 64)",
                [](auto& c) -> auto& { return c.measure.grid; }),
    };
    return keys;
}

inline const ConfigKey* find_key(std::string_view name) {
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const ConfigKey* k = find_key(key);
    if (!k) throw ConfigError(ConfigError::Kind::unknown_key, key, "unknown key '" + key + "'");
    k->set(cfg, value);
}

/// Parses `key = value` lines; `#` starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(ConfigError::Kind::syntax, {},
                              "line " + std::to_string(lineno) + ": expected key = value, got '" + t + "'");
        }
        out.emplace_back(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
    return out;
}

/// Defaults, then the config file, then flags; a subcommand given on the
/// command line overrides `command` from the file.
inline RunConfig parse_config(std::string_view file_text, const std::vector<std::pair<std::string, std::string>>& flags,
                              std::optional<Command> command = std::nullopt) {
    RunConfig cfg;
    for (const auto& [k, v] : parse_config_text(file_text)) apply_setting(cfg, k, v);
    for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
    if (command) cfg.command = command;
    if (!cfg.command) {
        throw ConfigError(ConfigError::Kind::missing_subcommand, "command",
                          "no subcommand given (one of spectrum, point, sweep, scan2d, classify, verify)");
    }
    return cfg;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Echo of every key, in key-table order.
inline nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : config_keys()) j[k.name] = k.get(cfg);
    return j;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    std::string bond;
    double error = 0.0;
    double tolerance = 0.0;
    std::string status;  // PASS | FAIL | SKIP
};

inline double max_abs_diff(const BondCorrelators& a, const BondCorrelators& b) {
    return std::max({std::abs(a.cxx - b.cxx), std::abs(a.cyy - b.cyy), std::abs(a.czz - b.czz),
                     std::abs(a.mz_left - b.mz_left), std::abs(a.mz_right - b.mz_right)});
}

inline std::vector<CheckResult> run_checks(const RunConfig& cfg) {
    std::vector<CheckResult> out;
    auto add = [&](std::string name, std::string bond, double err, double tol, bool skip = false) {
        const std::string status = skip ? "SKIP" : (std::isfinite(err) && err <= tol ? "PASS" : "FAIL");
        out.push_back({std::move(name), std::move(bond), err, tol, status});
    };
    const ModelParams& p = cfg.model;
    p.validate();

    const auto gm = green_matrix(p);
    const auto nn = momentum_correlators(p);
    for (BondKind kind : {BondKind::odd, BondKind::even}) {
        add("momentum_vs_realspace", to_string(kind), max_abs_diff(nn.bond(kind), bond_correlators(gm, kind)), 1e-10);
    }

    if (cfg.verify_ed) {
        if (p.n_sites() > ed::kMaxSites) {
            throw std::invalid_argument("verify: exact diagonalisation needs n_cells <= " +
                                        std::to_string(ed::kMaxSites / 2));
        }
        const auto res = ed::ground(p);
        add("ground_energy", "-", std::abs(res.ground_energy - ground_energy(p).total), 1e-8);
        const bool skip = !res.unique();
        for (BondKind kind : {BondKind::odd, BondKind::even}) {
            const int l = kind == BondKind::odd ? 0 : 1;
            const auto ed_bc = ed::ed_correlators(res, kind);
            add("correlators_vs_ed", to_string(kind), max_abs_diff(ed_bc, nn.bond(kind)), 1e-8, skip);
            const Eigen::Matrix4d rho = ed::two_site_rdm(res, l, (l + 1) % p.n_sites());
            const Eigen::Matrix4d x = assemble_xstate(nn.bond(kind)).matrix();
            add("xstate_vs_ed_rdm", to_string(kind), (rho - x).cwiseAbs().maxCoeff(), 1e-8, skip);
            double off_x = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    if (a != b && a + b != 3) off_x = std::max(off_x, std::abs(rho(a, b)));
            add("ed_rdm_off_x", to_string(kind), off_x, 1e-10, skip);
        }
    }

    if (cfg.verify_povm) {
        for (BondKind kind : {BondKind::odd, BondKind::even}) {
            const auto x = assemble_xstate(nn.bond(kind));
            const double closed = classical_correlation_closed_form(x);
            const auto num = classical_correlation_numeric(x, std::max(64, cfg.measure.grid));
            add("classical_closed_vs_numeric", to_string(kind), std::abs(closed - num.value), 1e-6);
        }
    }
    return out;
}

inline Table checks_table(const std::vector<CheckResult>& checks, const ModelParams& p) {
    Table t;
    t.columns = {"check", "bond", "error", "tolerance", "status"};
    for (const auto& c : checks) t.add_row({c.name, c.bond, c.error, c.tolerance, c.status});
    t.meta["kind"] = "verify";
    t.meta["params"] = params_json(p);
    return t;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitRuntime = 3 };

/// Executes one subcommand. Results go to `out` (or cfg.output), diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!cfg.command) {
            throw ConfigError(ConfigError::Kind::missing_subcommand, "command", "no subcommand given");
        }
        cfg.model.validate();
        Table table;
        int status = kExitOk;
        switch (*cfg.command) {
            case Command::spectrum: table = spectrum_table(cfg.model); break;
            case Command::point: {
                std::vector<PointEvaluation> evals;
                for (BondKind kind : {BondKind::odd, BondKind::even}) {
                    evals.push_back(evaluate_point(cfg.model, kind, cfg.measure));
                    if (!evals.back().ok()) throw std::runtime_error(evals.back().error);
                }
                table = point_table(evals);
                break;
            }
            case Command::sweep: {
                const auto res = sweep(cfg.sweep_spec());
                for (const auto& s : res.samples) {
                    if (!s.eval.ok()) err << "warning: sample t=" << format_number(s.t) << ": " << s.eval.error << '\n';
                }
                table = sweep_table(res);
                break;
            }
            case Command::scan2d: table = scan2d_table(scan_2d(cfg.scan_spec())); break;
            case Command::classify: {
                if (cfg.refine < 2) throw std::invalid_argument("refine must be at least 2");
                const SweepSpec spec = cfg.sweep_spec();
                const auto coarse = sweep(spec);
                const auto fine = sweep(spec.refined(cfg.refine));
                table = transitions_table(classify_transitions(coarse, fine, cfg.quantity, cfg.thresholds),
                                          cfg.quantity);
                break;
            }
            case Command::verify: {
                const auto checks = run_checks(cfg);
                int failed = 0;
                for (const auto& c : checks) failed += c.status == "FAIL";
                err << (failed ? "verify: " + std::to_string(failed) + " check(s) failed\n"
                               : std::string("verify: all checks passed\n"));
                table = checks_table(checks, cfg.model);
                if (failed) status = kExitCheckFailed;
                break;
            }
        }
        table.meta["command"] = to_string(*cfg.command);
        table.meta["config"] = config_echo(cfg);

        const std::string bytes = serialize(table, cfg.format);
        if (cfg.output.empty() || cfg.output == "-") {
            out << bytes;
            out.flush();
        } else {
            write_file(cfg.output, bytes);
        }
        return status;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace eqcm
