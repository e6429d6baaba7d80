#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbfw/analytic.hpp"
#include "sbfw/experiments.hpp"
#include "sbfw/parallel.hpp"
#include "sbfw/random.hpp"
#include "sbfw/walks.hpp"

namespace sbfw::cli {

using nlohmann::json;
namespace fs = std::filesystem;
namespace ex = sbfw::experiments;

namespace {

// Thrown for parameter errors discovered after parsing; maps to exit 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Params {
    std::uint64_t seed = 1;
    std::size_t reps = 0;
    unsigned workers = 1;
    std::string out = ".";
    std::string config;
    bool raw = false;
    bool timing = false;

    std::size_t n = 0;
    std::string grid;
    double c = 0.0;
    double t = 1.0;
    double eps_exponent = 0.2;
    double q = 1.0;
    double s = 1.0;
    double min_length = 0.0;

    CLI::Option* workers_opt = nullptr;
    CLI::Option* min_length_opt = nullptr;
    CLI::Option* t_opt = nullptr;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != token.size()) throw UsageError(what + ": cannot parse '" + token + "'");
    return v;
}

// Comma-separated numbers; `special` maps named tokens (e.g. "rho") to values.
std::vector<double> parse_list(const std::string& text, const std::string& what,
                               const std::map<std::string, double>& special = {}) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto it = special.find(item);
        out.push_back(it != special.end() ? it->second : parse_number(item, what));
    }
    if (out.empty()) throw UsageError(what + ": empty list");
    return out;
}

void add_common(CLI::App* sub, Params& p, bool with_reps) {
    sub->add_option("--seed", p.seed, "Master seed (u64)")->capture_default_str();
    if (with_reps) sub->add_option("--reps", p.reps, "Replications")->capture_default_str();
    p.workers_opt = sub->add_option("--workers", p.workers, "Worker threads (default: available parallelism; env SBFW_WORKERS)")
                        ->check(CLI::PositiveNumber);
    sub->add_option("--out", p.out, "Output directory")->capture_default_str();
    sub->add_option("--config", p.config, "key=value config file; command-line flags take precedence");
    sub->add_flag("--raw", p.raw, "Also write per-replication values to raw.csv");
    sub->add_flag("--timing", p.timing, "Include wall_clock_ms in report.json (breaks byte-identical reruns)");
}

// Lines of the output header: tool, version, command and the run config.
std::vector<std::string> header_lines(const std::string& command, const json& config) {
    std::vector<std::string> lines{std::string("tool: ") + kToolName, std::string("version: ") + kToolVersion,
                                   "command: " + command};
    for (const auto& [k, v] : config.items()) lines.push_back(k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()));
    return lines;
}

std::string config_value(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config_value(v[i]);
        return s;
    }
    return v.dump();
}

void write_outputs(const Params& p, const std::string& command, const json& config, const ex::ExperimentReport& report) {
    const fs::path dir(p.out);
    fs::create_directories(dir);

    json doc = report.to_json(p.timing);
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = command;
    doc["run_config"] = config;
    std::ofstream(dir / "report.json") << doc.dump(2) << '\n';

    std::ofstream cfg(dir / "run_config.cfg");
    cfg << "# " << kToolName << " " << kToolVersion << "\n# command: " << command << '\n';
    for (const auto& [k, v] : config.items()) {
        if (v.is_boolean() && !v.get<bool>()) continue;
        cfg << k << '=' << config_value(v) << '\n';
    }

    if (p.raw) {
        std::ofstream raw(dir / "raw.csv");
        for (const auto& line : header_lines(command, config)) raw << "# " << line << '\n';
        ex::write_raw_csv(raw, report);
    }
}

void print_summary(std::ostream& out, const ex::ExperimentReport& report) {
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    for (const auto& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "  observed=" << c.observed << " target=" << c.target;
        if (c.band > 0.0) out << " band=" << c.band;
        out << "  (" << c.rule << ")\n";
    }
    out << (report.passed() ? "all checks passed" : "some checks failed") << '\n';
}

json common_config(const Params& p, bool with_reps) {
    json cfg = {{"seed", p.seed}, {"raw", p.raw}, {"timing", p.timing}};
    if (with_reps) cfg["reps"] = p.reps;
    return cfg;
}

struct Command {
    CLI::App* app;
    Params params;
    bool with_reps;
    // Builds the run config (execution-only settings excluded) and runs.
    std::function<int(Command&, std::ostream&, std::ostream&)> run;
};

int finish(Command& cmd, const std::string& name, json config, const ex::ExperimentReport& report, std::ostream& out,
           std::ostream& err) {
    write_outputs(cmd.params, name, config, report);
    print_summary(out, report);
    err << "[" << name << "] wall clock " << report.wall_clock_ms << " ms, " << cmd.params.workers << " worker(s)\n";
    return report.passed() ? 0 : 1;
}

ex::RunOptions run_options(const Params& p) {
    ex::RunOptions o;
    o.workers = p.workers;
    o.keep_raw = p.raw;
    return o;
}

int run_supercrit(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    const ex::RegimeGrid grid{ex::Regime::super_critical, p.n, parse_list(p.grid, "--c-grid")};
    json cfg = common_config(p, true);
    cfg["n"] = p.n;
    cfg["c-grid"] = grid.grid;
    return finish(cmd, "supercrit", cfg, ex::run_supercrit_fluctuations(grid, p.reps, p.seed, run_options(p)), out, err);
}

int run_bsc(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    const ex::RegimeGrid grid{ex::Regime::barely_super_critical, p.n, parse_list(p.grid, "--t-grid"), p.eps_exponent};
    json cfg = common_config(p, true);
    cfg["n"] = p.n;
    cfg["t-grid"] = grid.grid;
    cfg["eps-exponent"] = p.eps_exponent;
    return finish(cmd, "bsc", cfg, ex::run_bsc_fluctuations(grid, p.reps, p.seed, run_options(p)), out, err);
}

int run_oracle(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    json cfg = common_config(p, true);
    cfg["n"] = p.n;
    cfg["c"] = p.c;
    if (p.n > 6) throw UsageError("--n must be at most 6 for the oracle");
    return finish(cmd, "oracle", cfg,
                  ex::run_oracle_equivalence(static_cast<int>(p.n), p.c, p.reps, p.seed, run_options(p)), out, err);
}

int run_donsker(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    if (!(p.c > 1.0)) throw UsageError("--c must exceed 1");
    const auto s_points = parse_list(p.grid, "--s-points", {{"rho", analytic::rho(p.c)}});
    json cfg = common_config(p, true);
    cfg["n"] = p.n;
    cfg["c"] = p.c;
    cfg["s-points"] = s_points;
    return finish(cmd, "donsker", cfg, ex::run_donsker_marginal(p.n, p.c, s_points, p.reps, p.seed, run_options(p)),
                  out, err);
}

int run_doobmeyer(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    json cfg = common_config(p, false);
    cfg["q"] = p.q;
    cfg["s"] = p.s;
    cfg["samples"] = p.reps;
    return finish(cmd, "doobmeyer", cfg, ex::run_doob_meyer_check(p.q, p.s, p.reps, p.seed, run_options(p)), out, err);
}

int run_localtime(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    if (p.min_length_opt->count() == 0) {
        // A tenth of the expected largest excursion, rho_n(t) / eps.
        if (p.n == 0 || !(p.t > 0.0) || !(p.eps_exponent > 0.0 && p.eps_exponent < 1.0 / 3.0))
            throw UsageError("invalid --n, --t or --eps-exponent");
        const double eps = std::pow(static_cast<double>(p.n), -p.eps_exponent);
        p.min_length = 0.1 * analytic::rho_n(p.t, eps) / eps;
    }
    json cfg = common_config(p, true);
    cfg["n"] = p.n;
    cfg["t"] = p.t;
    cfg["eps-exponent"] = p.eps_exponent;
    cfg["min-length"] = p.min_length;
    return finish(cmd, "localtime", cfg,
                  ex::run_local_time_check(p.n, p.t, p.eps_exponent, p.min_length, p.reps, p.seed, run_options(p)), out,
                  err);
}

int run_dump(Command& cmd, std::ostream& out, std::ostream& err) {
    auto& p = cmd.params;
    if (p.n == 0) throw UsageError("--n must be positive");
    const bool bsc = p.t_opt->count() > 0;
    json cfg = common_config(p, false);
    cfg.erase("timing");
    cfg.erase("raw");
    cfg["n"] = p.n;

    const double nd = static_cast<double>(p.n);
    double mass = 1.0 / nd;
    double rate = 0.0;
    if (bsc) {
        if (!(p.t > 0.0) || !(p.eps_exponent > 0.0 && p.eps_exponent < 1.0 / 3.0))
            throw UsageError("invalid --t or --eps-exponent");
        const double eps = std::pow(nd, -p.eps_exponent);
        mass = 1.0 / (nd * eps);
        rate = eps * (1.0 + p.t * eps);
        cfg["t"] = p.t;
        cfg["eps-exponent"] = p.eps_exponent;
    } else {
        if (!(p.c > 0.0)) throw UsageError("--c must be positive");
        rate = p.c;
        cfg["c"] = p.c;
    }

    Stream rng = Stream::derive(p.seed, StreamDomain::dump, 0);
    auto times = draw_sorted_exponentials(p.n, rng);
    for (double& v : times) v /= rate;
    const WalkPath walk = build_uniform_walk(times, mass);
    const ExcursionSet excursions = decompose(walk);

    const fs::path dir(p.out);
    fs::create_directories(dir);
    const auto header = header_lines("dump", cfg);
    {
        std::ofstream f(dir / "jumps.csv");
        for (const auto& line : header) f << "# " << line << '\n';
        write_jumps_csv(f, walk);
    }
    {
        std::ofstream f(dir / "excursions.csv");
        for (const auto& line : header) f << "# " << line << '\n';
        write_excursions_csv(f, excursions);
    }
    out << "wrote " << walk.jump_count() << " jumps and " << excursions.size() << " excursions to " << dir.string()
        << '\n';
    err << "[dump] done\n";
    return 0;
}

// Worker count: --workers, then SBFW_WORKERS, then the config file, then the
// available parallelism.
unsigned resolve_workers(const Params& p, const std::string& config_workers) {
    if (p.workers_opt->count() > 0) return p.workers;
    auto parse = [](const std::string& text, const char* source) {
        const double v = parse_number(trim(text), source);
        if (!(v >= 1.0) || v != std::floor(v) || v > 4096.0)
            throw UsageError(std::string(source) + ": worker count must be a positive integer");
        return static_cast<unsigned>(v);
    };
    if (const char* env = std::getenv("SBFW_WORKERS"); env && *env) return parse(env, "SBFW_WORKERS");
    if (!config_workers.empty()) return parse(config_workers, "config workers");
    return default_workers();
}

}  // namespace

std::vector<std::string> config_to_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::vector<std::string> args;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config line without '=': " + line);
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (value == "true") {
            args.push_back("--" + key);
        } else if (value != "false") {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simultaneous breadth-first walk experiments", kToolName};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::map<std::string, Command> commands;
    auto make = [&](const std::string& name, const std::string& help, bool with_reps,
                    std::function<int(Command&, std::ostream&, std::ostream&)> run) -> Command& {
        Command& cmd = commands[name];
        cmd.app = app.add_subcommand(name, help);
        cmd.with_reps = with_reps;
        cmd.run = std::move(run);
        return cmd;
    };

    {
        auto& cmd = make("supercrit", "Largest-excursion fluctuations along a super-critical c-grid", true, run_supercrit);
        auto& p = cmd.params;
        p.n = 20000;
        p.reps = 2000;
        p.grid = "1.5,2,3";
        cmd.app->add_option("--n", p.n, "Number of vertices")->capture_default_str();
        cmd.app->add_option("--c-grid", p.grid, "Comma-separated c values, each > 1")->capture_default_str();
        add_common(cmd.app, p, true);
    }
    {
        auto& cmd = make("bsc", "Largest-excursion fluctuations along a barely super-critical t-grid", true, run_bsc);
        auto& p = cmd.params;
        p.n = 1000000;
        p.reps = 500;
        p.grid = "0.5,1,2";
        cmd.app->add_option("--n", p.n, "Number of vertices")->capture_default_str();
        cmd.app->add_option("--t-grid", p.grid, "Comma-separated t values, each > 0")->capture_default_str();
        cmd.app->add_option("--eps-exponent", p.eps_exponent, "a in eps_n = n^-a, 0 < a < 1/3")->capture_default_str();
        add_common(cmd.app, p, true);
    }
    {
        auto& cmd = make("oracle", "Walk-derived partition law against exact enumeration", true, run_oracle);
        auto& p = cmd.params;
        p.n = 5;
        p.c = 1.2;
        p.reps = 100000;
        cmd.app->add_option("--n", p.n, "Number of vertices, at most 6")->capture_default_str();
        cmd.app->add_option("--c", p.c, "Edge probability is 1 - exp(-c/n)")->capture_default_str();
        add_common(cmd.app, p, true);
    }
    {
        auto& cmd = make("donsker", "Marginals of sqrt(n)(Z - Phi) against the bridge law", true, run_donsker);
        auto& p = cmd.params;
        p.n = 100000;
        p.c = 1.5;
        p.reps = 2000;
        p.grid = "0.2,0.4,rho";
        cmd.app->add_option("--n", p.n, "Number of vertices")->capture_default_str();
        cmd.app->add_option("--c", p.c, "Super-critical parameter c > 1")->capture_default_str();
        cmd.app->add_option("--s-points", p.grid, "Comma-separated s values; 'rho' stands for rho(c)")
            ->capture_default_str();
        add_common(cmd.app, p, true);
    }
    {
        auto& cmd = make("doobmeyer", "Monte Carlo check of the single-jump Doob-Meyer moments", false, run_doobmeyer);
        auto& p = cmd.params;
        p.reps = 1000000;
        cmd.app->add_option("--q", p.q, "Rate q > 0")->capture_default_str();
        cmd.app->add_option("--s", p.s, "Time s > 0")->capture_default_str();
        cmd.app->add_option("--samples,--reps", p.reps, "Number of samples")->capture_default_str();
        add_common(cmd.app, p, false);
    }
    {
        auto& cmd = make("localtime", "Exponential law of q L (-Z(T-)) over long excursions", true, run_localtime);
        auto& p = cmd.params;
        p.n = 100000;
        p.reps = 2000;
        cmd.app->add_option("--n", p.n, "Number of vertices")->capture_default_str();
        cmd.app->add_option("--t", p.t, "Time parameter t > 0")->capture_default_str();
        cmd.app->add_option("--eps-exponent", p.eps_exponent, "a in eps_n = n^-a, 0 < a < 1/3")->capture_default_str();
        p.min_length_opt = cmd.app->add_option("--min-length", p.min_length,
                                               "Excursion length threshold (default: 0.1 rho_n(t)/eps)");
        add_common(cmd.app, p, true);
    }
    {
        auto& cmd = make("dump", "Write one walk's jumps and excursions as CSV", false, run_dump);
        auto& p = cmd.params;
        p.n = 10;
        p.c = 1.5;
        cmd.app->add_option("--n", p.n, "Number of vertices")->capture_default_str();
        cmd.app->add_option("--c", p.c, "Super-critical walk with jump times xi/c")->capture_default_str();
        p.t_opt = cmd.app->add_option("--t", p.t, "Barely super-critical walk at this t instead of --c");
        cmd.app->add_option("--eps-exponent", p.eps_exponent, "a in eps_n = n^-a (with --t)")->capture_default_str();
        add_common(cmd.app, p, false);
    }

    // Config values go first so that command-line flags, parsed later, win.
    std::vector<std::string> full;
    std::string config_workers;
    try {
        std::string config_path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        std::vector<std::string> from_config;
        if (!config_path.empty()) {
            const auto tokens = config_to_args(config_path);
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (tokens[i] == "--workers" && i + 1 < tokens.size()) {
                    config_workers = tokens[++i];
                    continue;
                }
                from_config.push_back(tokens[i]);
            }
        }
        if (!args.empty() && commands.count(args[0]) > 0) {
            full.push_back(args[0]);
            full.insert(full.end(), from_config.begin(), from_config.end());
            full.insert(full.end(), args.begin() + 1, args.end());
        } else {
            full = args;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        std::vector<std::string> reversed(full.rbegin(), full.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        err << target->help();
        return 2;
    }

    Command* chosen = nullptr;
    for (auto& [name, cmd] : commands)
        if (cmd.app->parsed()) chosen = &cmd;
    if (chosen == nullptr) {
        err << app.help();
        return 2;
    }

    try {
        chosen->params.workers = resolve_workers(chosen->params, config_workers);
        return chosen->run(*chosen, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace sbfw::cli
