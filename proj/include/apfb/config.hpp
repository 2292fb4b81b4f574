#pragma once
// Run configuration: flat key=value text with '#' comments, overridden by
// --key value command-line pairs (later sources win).  Unknown keys are
// rejected; every accepted key has a default, and the full effective set is
// echoed into the run manifest so no parameter is silently defaulted.

#include "apfb/minimize.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace apfb {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& cli_commands() {
    static const std::vector<std::string> cmds = {
        "params",  "minimize",   "ode",        "weiss",
        "blowup",  "barrier",    "linearized", "gamma",
    };
    return cmds;
}

struct RunConfig {
    std::string command;           // one of cli_commands()
    double gamma = 1.0;            // potential exponent, in (0,2)
    double h = 1.0 / 64;           // grid spacing
    std::string boundary = "half_plane"; // half_plane | radial | constant:<v> | custom:<path>
    double origin_x = 0.0, origin_y = 0.0; // node positions for custom fields
    std::string output = "apfb_out";

    // solver
    double sweep_tolerance = 1e-9;
    int max_sweeps = 200000;
    double node_tolerance = 1e-15;
    std::string init = "auto"; // auto | zero | comparator | cascade | given
    int restarts = 0;
    std::uint64_t seed = 1;

    // analysis knobs
    double mu = 0.0;          // ode drive, barrier drift
    double epsilon = 1e-2;    // barrier w-formulation scale
    double barrier_A = 8.0;   // w-formulation amplitude
    double radius = 0.25;     // gamma-sweep disk / blowup window
    std::string gammas = "1.98";  // gamma command: comma list
    std::string deltas = "0.05";  // gamma command: comma list
    double r_min = 0.1, r_max = 0.5, r_step = 0.05; // weiss radii
    double center_x = 0.0, center_y = 0.0;          // weiss / blowup / growth
    std::string field;        // input field file for weiss/blowup (optional)
    std::string lin_case = "linear"; // linearized: const | linear | kernel
};

namespace detail {

struct KeySource {
    std::string where; // "path:line" or "--key"
};

inline ConfigError cfg_fail(const std::string& where, const std::string& msg) {
    return ConfigError(where + ": " + msg);
}

inline double parse_double(const std::string& where, const std::string& key,
                           const std::string& val) {
    char* end = nullptr;
    const double v = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0')
        throw cfg_fail(where, "malformed value for '" + key + "': '" + val + "'");
    return v;
}

inline int parse_int(const std::string& where, const std::string& key,
                     const std::string& val) {
    char* end = nullptr;
    const long v = std::strtol(val.c_str(), &end, 10);
    if (end == val.c_str() || *end != '\0')
        throw cfg_fail(where, "malformed value for '" + key + "': '" + val + "'");
    return static_cast<int>(v);
}

inline std::uint64_t parse_u64(const std::string& where, const std::string& key,
                               const std::string& val) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(val.c_str(), &end, 10);
    if (end == val.c_str() || *end != '\0')
        throw cfg_fail(where, "malformed value for '" + key + "': '" + val + "'");
    return v;
}

inline void apply_key(RunConfig& cfg, const std::string& key,
                      const std::string& val, const std::string& where) {
    if (key == "command") {
        for (const auto& c : cli_commands())
            if (val == c) {
                cfg.command = val;
                return;
            }
        std::string names;
        for (const auto& c : cli_commands()) names += " " + c;
        throw cfg_fail(where, "unknown command '" + val + "'; expected one of" + names);
    } else if (key == "gamma") {
        cfg.gamma = parse_double(where, key, val);
        if (!(cfg.gamma > 0.0) || !(cfg.gamma < 2.0))
            throw cfg_fail(where, "gamma must lie in (0,2), got " + val);
    } else if (key == "h") {
        cfg.h = parse_double(where, key, val);
        if (!(cfg.h > 0.0) || cfg.h > 0.5)
            throw cfg_fail(where, "h must lie in (0, 0.5], got " + val);
    } else if (key == "boundary") {
        cfg.boundary = val;
    } else if (key == "origin_x") {
        cfg.origin_x = parse_double(where, key, val);
    } else if (key == "origin_y") {
        cfg.origin_y = parse_double(where, key, val);
    } else if (key == "output") {
        if (val.empty()) throw cfg_fail(where, "output directory must be nonempty");
        cfg.output = val;
    } else if (key == "sweep_tolerance") {
        cfg.sweep_tolerance = parse_double(where, key, val);
        if (!(cfg.sweep_tolerance > 0.0))
            throw cfg_fail(where, "sweep_tolerance must be positive, got " + val);
    } else if (key == "max_sweeps") {
        cfg.max_sweeps = parse_int(where, key, val);
        if (cfg.max_sweeps < 1)
            throw cfg_fail(where, "max_sweeps must be >= 1, got " + val);
    } else if (key == "node_tolerance") {
        cfg.node_tolerance = parse_double(where, key, val);
        if (!(cfg.node_tolerance > 0.0))
            throw cfg_fail(where, "node_tolerance must be positive, got " + val);
    } else if (key == "init") {
        if (val != "auto" && val != "zero" && val != "comparator" &&
            val != "cascade" && val != "given")
            throw cfg_fail(where, "init must be auto|zero|comparator|cascade|given, got '" + val + "'");
        cfg.init = val;
    } else if (key == "restarts") {
        cfg.restarts = parse_int(where, key, val);
        if (cfg.restarts < 0)
            throw cfg_fail(where, "restarts must be >= 0, got " + val);
    } else if (key == "seed") {
        cfg.seed = parse_u64(where, key, val);
    } else if (key == "mu") {
        cfg.mu = parse_double(where, key, val);
    } else if (key == "epsilon") {
        cfg.epsilon = parse_double(where, key, val);
        if (!(cfg.epsilon > 0.0))
            throw cfg_fail(where, "epsilon must be positive, got " + val);
    } else if (key == "barrier_A") {
        cfg.barrier_A = parse_double(where, key, val);
        if (!(cfg.barrier_A >= 0.0))
            throw cfg_fail(where, "barrier_A must be >= 0, got " + val);
    } else if (key == "radius") {
        cfg.radius = parse_double(where, key, val);
        if (!(cfg.radius > 0.0))
            throw cfg_fail(where, "radius must be positive, got " + val);
    } else if (key == "gammas") {
        cfg.gammas = val;
    } else if (key == "deltas") {
        cfg.deltas = val;
    } else if (key == "r_min") {
        cfg.r_min = parse_double(where, key, val);
    } else if (key == "r_max") {
        cfg.r_max = parse_double(where, key, val);
    } else if (key == "r_step") {
        cfg.r_step = parse_double(where, key, val);
        if (!(cfg.r_step > 0.0))
            throw cfg_fail(where, "r_step must be positive, got " + val);
    } else if (key == "center_x") {
        cfg.center_x = parse_double(where, key, val);
    } else if (key == "center_y") {
        cfg.center_y = parse_double(where, key, val);
    } else if (key == "field") {
        cfg.field = val;
    } else if (key == "lin_case") {
        if (val != "const" && val != "linear" && val != "kernel")
            throw cfg_fail(where, "lin_case must be const|linear|kernel, got '" + val + "'");
        cfg.lin_case = val;
    } else {
        throw cfg_fail(where, "unknown key '" + key + "'");
    }
}

inline std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace detail

/// Parses a config file into cfg.  Lines are key=value; blank lines and
/// lines starting with '#' are comments.  Errors carry path:line.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        std::string body = line;
        const std::size_t hash = body.find('#');
        if (hash != std::string::npos) body.erase(hash);
        body = detail::trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw detail::cfg_fail(where, "expected key=value, got '" + body + "'");
        const std::string key = detail::trim(body.substr(0, eq));
        const std::string val = detail::trim(body.substr(eq + 1));
        if (key.empty()) throw detail::cfg_fail(where, "empty key");
        detail::apply_key(cfg, key, val, where);
    }
}

/// Builds a RunConfig from CLI arguments:
///   [command] [config-file] [--key value]...
/// A leading bare word naming a subcommand sets `command`; any other bare
/// word is read as a config file (at most one).  --key value overrides are
/// applied last and therefore take precedence over the file.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string config_path;
    bool have_file = false;

    for (std::size_t k = 0; k < args.size(); ++k) {
        const std::string& a = args[k];
        if (a.rfind("--", 0) == 0) {
            const std::string key = a.substr(2);
            if (key.empty()) throw ConfigError("--: missing key name");
            if (k + 1 >= args.size())
                throw ConfigError("--" + key + ": missing value");
            overrides.emplace_back(key, args[++k]);
        } else {
            bool is_cmd = false;
            for (const auto& c : cli_commands()) is_cmd = is_cmd || (a == c);
            if (is_cmd && cfg.command.empty() && !have_file) {
                cfg.command = a;
            } else if (!have_file) {
                config_path = a;
                have_file = true;
            } else {
                throw ConfigError("unexpected extra argument '" + a + "'");
            }
        }
    }

    // Bare command words must survive a config file that also sets one only
    // if the file comes later in precedence; files are the base layer, so a
    // command given on the command line is re-applied as an override.
    const std::string cmd_arg = cfg.command;
    if (have_file) load_config_file(cfg, config_path);
    if (!cmd_arg.empty()) cfg.command = cmd_arg;
    for (const auto& [key, val] : overrides)
        detail::apply_key(cfg, key, val, "--" + key);

    if (cfg.command.empty()) {
        std::string names;
        for (const auto& c : cli_commands()) names += " " + c;
        throw ConfigError("no command given; expected one of" + names);
    }
    return cfg;
}

/// Comma-separated list of reals ("1.5,1.7,1.9").
inline std::vector<double> parse_double_list(const std::string& key,
                                             const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        out.push_back(detail::parse_double(key, key, item));
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

} // namespace apfb
