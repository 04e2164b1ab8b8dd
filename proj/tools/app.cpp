#include "app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "wsv/cases.hpp"
#include "wsv/error.hpp"
#include "wsv/estimates.hpp"
#include "wsv/gronwall.hpp"
#include "wsv/report.hpp"
#include "wsv/volterra.hpp"

namespace wsv::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (t == "inf" || t == "infinity") {
        return kInfinity;
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0') {
        fail(ErrorKind::Parameter, what + ": '" + text + "' is not a number");
    }
    return v;
}

/// Certification failures are not exceptions of the library; the CLI raises them itself.
struct CertificationFailure {
    std::string reason;
};

}  // namespace

// ---------------------------------------------------------------------------
// Config

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::Parameter,
                 origin + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            fail(ErrorKind::Parameter, origin + ":" + std::to_string(number) + ": empty key");
        }
        c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Parameter, "cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::number(const std::string& key, double fallback) const {
    return has(key) ? parse_number(get(key, ""), key) : fallback;
}

std::uint64_t Config::integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const std::string t = get(key, "");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 0);
    if (t.empty() || *end != '\0' || t[0] == '-') {
        fail(ErrorKind::Parameter, key + ": '" + t + "' is not a nonnegative integer");
    }
    return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
    if (!has(key)) {
        return fallback;
    }
    const std::string v = get(key, "");
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    fail(ErrorKind::Parameter, key + ": '" + v + "' is not a boolean");
}

void Config::require_known(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : values_) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            fail(ErrorKind::Parameter, "unknown config key '" + key + "'");
        }
    }
}

Selector Selector::parse(const std::string& text) {
    const std::string t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos) {
        if (t.empty()) {
            fail(ErrorKind::Parameter, "empty selector");
        }
        return Selector{t, {}};
    }
    if (t.back() != ')') {
        fail(ErrorKind::Parameter, "selector '" + text + "' is missing ')'");
    }
    Selector s{trim(t.substr(0, open)), {}};
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (!trim(inner).empty()) {
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            s.args.push_back(trim(item));
        }
    }
    return s;
}

double Selector::arg(std::size_t k, double fallback) const {
    return k < args.size() ? parse_number(args[k], name + " argument") : fallback;
}

double Selector::arg(std::size_t k) const {
    if (k >= args.size()) {
        fail(ErrorKind::Parameter, "selector " + name + " needs at least " + std::to_string(k + 1) +
                                       " argument(s)");
    }
    return parse_number(args[k], name + " argument");
}

// ---------------------------------------------------------------------------
// Commands

namespace {

const std::vector<std::string> kKnownKeys = {
    "command",         "problem.nu",       "problem.h",        "problem.T",
    "problem.p",       "problem.q",        "problem.kernel",   "problem.zeta",
    "problem.L",       "problem.theta",    "problem.control",  "grid.n_points",
    "grid.offset",     "solver.epsilon",   "solver.delta",     "solver.picard_tol",
    "solver.max_iter", "solver.allow_wide_window",             "bound.K",
    "bound.policy",    "example.nu_e",     "example.beta_e",   "example.delta_e",
    "example.sigma_e", "example.gamma_e",  "example.h",        "example.p",
    "example.cutoffs", "estimates.cases",  "output.dir",       "output.tolerance",
    "run.seed",        "run.workers",
};

struct Context {
    const Config& cfg;
    std::string command;
    std::filesystem::path out;
    std::uint64_t seed;
    std::size_t workers;
    std::vector<std::string> preamble;

    std::string path(const std::string& name) const { return (out / name).string(); }
};

GridSpec make_grid(const Config& cfg) {
    const double t_end = cfg.number("problem.T", 1.0);
    const std::size_t n = cfg.integer("grid.n_points", 512);
    double h = cfg.number("problem.h", 0.0);
    if (n < 2) {
        fail(ErrorKind::Parameter, "grid.n_points must be at least 2");
    }
    if (!cfg.flag("grid.offset", false)) {
        return GridSpec(t_end, n, h);
    }
    // Shift the end by half a cell so the nodes avoid the integer-valued times of [0, T].
    const double shifted = t_end * (2.0 * static_cast<double>(n) - 1.0) / (2.0 * static_cast<double>(n));
    const double dt = shifted / static_cast<double>(n);
    if (h > 0.0) {
        h = std::max(1.0, std::round(h / dt)) * dt;
    }
    return GridSpec(shifted, n, h);
}

std::uint64_t salt(const std::string& key) {
    std::uint64_t s = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : key) {
        s = (s ^ c) * 1099511628211ULL;
    }
    return s;
}

/// constant(c), power(sigma[, c]) = c |t-1|^{sigma-1}, table(file[, column]), random(lo, hi[, knots]).
GridFunction select_function(const Context& ctx, const GridSpec& spec, const std::string& key,
                             const std::string& fallback) {
    const Selector sel = Selector::parse(ctx.cfg.get(key, fallback));
    if (sel.name == "constant") {
        return GridFunction::constant(spec, sel.arg(0, 0.0));
    }
    if (sel.name == "power") {
        const double sigma = sel.arg(0);
        const double c = sel.arg(1, 1.0);
        return GridFunction::sample(spec, [&](double t) {
            return sigma == 1.0 ? c : c * std::pow(std::abs(t - 1.0), sigma - 1.0);
        });
    }
    if (sel.name == "table") {
        if (sel.args.empty()) {
            fail(ErrorKind::Parameter, key + ": table needs a file name");
        }
        const CsvTable table = read_csv(sel.args[0]);
        if (table.columns.size() < 2) {
            fail(ErrorKind::Structural, key + ": table needs a t column and a value column");
        }
        const std::string column = sel.args.size() > 1 ? sel.args[1] : table.columns[1];
        const auto t = table.column(table.columns[0]);
        const auto v = table.column(column);
        if (v.size() != spec.n_points() + 1) {
            fail(ErrorKind::Structural, key + ": table has " + std::to_string(v.size()) +
                                            " rows, grid needs " +
                                            std::to_string(spec.n_points() + 1));
        }
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (std::abs(t[i] - spec.horizon_time(i)) > 1e-12 * (1.0 + spec.t_end())) {
                fail(ErrorKind::Structural, key + ": table times do not match the grid");
            }
        }
        return GridFunction(spec, v);
    }
    if (sel.name == "random") {
        const double lo = sel.arg(0, 0.0);
        const double hi = sel.arg(1, 1.0);
        const auto knots = static_cast<std::size_t>(sel.arg(2, 8.0));
        if (!(lo <= hi) || knots < 1) {
            fail(ErrorKind::Parameter, key + ": random needs lo <= hi and knots >= 1");
        }
        std::mt19937_64 rng(ctx.seed ^ salt(key));
        std::uniform_real_distribution<double> u(lo, hi);
        std::vector<double> values(knots + 1);
        for (double& x : values) {
            x = u(rng);
        }
        return GridFunction::sample(spec, [&](double t) {
            const double pos = t / spec.t_end() * static_cast<double>(knots);
            const std::size_t k = std::min(static_cast<std::size_t>(pos), knots - 1);
            const double frac = pos - static_cast<double>(k);
            return (1.0 - frac) * values[k] + frac * values[k + 1];
        });
    }
    fail(ErrorKind::Parameter, key + ": unknown selector '" + sel.name + "'");
}

ExampleParams example_params(const Config& cfg) {
    ExampleParams p;
    p.nu_e = Rational::parse(cfg.get("example.nu_e", "2/3"));
    p.beta_e = Rational::parse(cfg.get("example.beta_e", "1/2"));
    p.delta_e = Rational::parse(cfg.get("example.delta_e", "1/2"));
    p.sigma_e = Rational::parse(cfg.get("example.sigma_e", "1"));
    p.gamma_e = cfg.number("example.gamma_e", 1.0);
    p.h = cfg.number("example.h", 0.25);
    p.validate();
    return p;
}

/// Comma-separated decreasing cutoffs; the default is 0.1 * 2^-k, k = 0..5, then 1e-3.
std::vector<double> cutoff_list(const Config& cfg) {
    if (!cfg.has("example.cutoffs")) {
        std::vector<double> out = default_cutoffs(6);
        out.push_back(1e-3);
        return out;
    }
    std::vector<double> out;
    std::stringstream in(cfg.get("example.cutoffs", ""));
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_number(item, "example.cutoffs"));
    }
    return out;
}

std::string grid_line(const GridSpec& spec) {
    return "grid: T=" + format_double(spec.t_end()) + " n_points=" + std::to_string(spec.n_points()) +
           " h=" + format_double(spec.delay()) + " dt=" + format_double(spec.step());
}

VolterraProblem build_volterra(const Context& ctx, const GridSpec& spec) {
    const Config& cfg = ctx.cfg;
    const double p = cfg.number("problem.p", 2.0);
    const Selector kernel = Selector::parse(cfg.get("problem.kernel", "zero"));
    if (kernel.name == "example414") {
        return example_problem(example_params(cfg), spec, p);
    }
    GeneratorKernel k = [&] {
        if (kernel.name == "zero") {
            return zero_kernel(spec);
        }
        if (kernel.name == "linear") {
            return linear_kernel(spec, kernel.arg(0), kernel.arg(1), kernel.arg(2), kernel.arg(3, 0.0));
        }
        if (kernel.name == "delayed-linear") {
            return delayed_linear_kernel(spec, kernel.arg(0, 1.0));
        }
        fail(ErrorKind::Parameter, "problem.kernel: unknown kernel '" + kernel.name + "'");
    }();
    const GridFunction zeta = select_function(ctx, spec, "problem.zeta", "constant(1)");
    const GridFunction control = select_function(ctx, spec, "problem.control", "constant(0)");
    VolterraProblem prob{VectorGridFunction(zeta), std::move(k), VectorGridFunction(control),
                         cfg.number("problem.nu", 0.5), p};
    prob.validate();
    return prob;
}

int cmd_solve(Context& ctx) {
    const GridSpec spec = make_grid(ctx.cfg);
    ctx.preamble.push_back(grid_line(spec));
    const VolterraProblem prob = build_volterra(ctx, spec);
    SolverConfig sc;
    sc.epsilon = ctx.cfg.number("solver.epsilon", -1.0);
    sc.delta = ctx.cfg.number("solver.delta", 0.0);
    sc.picard_tol = ctx.cfg.number("solver.picard_tol", 1e-10);
    sc.max_iter = static_cast<int>(ctx.cfg.integer("solver.max_iter", 500));
    sc.allow_wide_window = ctx.cfg.flag("solver.allow_wide_window", false);
    const Solution sol = picard_solve(prob, sc);
    write_csv(ctx.path("solution.csv"), solution_table(sol.xi), ctx.preamble);

    int sweeps = 0;
    for (int it : sol.iterations) {
        sweeps += it;
    }
    std::ostringstream info;
    for (const auto& line : ctx.preamble) {
        info << "# " << line << '\n';
    }
    info << "residual = " << format_double(fixed_point_residual(prob, sol.xi)) << '\n'
         << "epsilon = " << format_double(sol.epsilon) << '\n'
         << "delta = " << format_double(sol.delta) << '\n'
         << "window_nodes = " << sol.window_nodes << '\n'
         << "windows = " << sol.iterations.size() << '\n'
         << "sweeps = " << sweeps << '\n';
    write_text(ctx.path("residual.txt"), info.str());
    return kOk;
}

int cmd_bound(Context& ctx, bool verify) {
    const GridSpec spec = make_grid(ctx.cfg);
    ctx.preamble.push_back(grid_line(spec));
    const double nu = ctx.cfg.number("problem.nu", 0.5);
    const GronwallProblem prob{select_function(ctx, spec, "problem.L", "constant(0)"),
                               select_function(ctx, spec, "problem.theta", "constant(1)"), nu,
                               ctx.cfg.number("problem.q", 2.0 / nu)};
    const std::string policy_name = ctx.cfg.get("bound.policy", "derived");
    KPolicy policy;
    if (policy_name == "derived") {
        policy = KPolicy::AtLeastDerived;
    } else if (policy_name == "exact") {
        policy = KPolicy::Exact;
    } else {
        fail(ErrorKind::Parameter, "bound.policy must be 'derived' or 'exact'");
    }
    if (policy == KPolicy::Exact && !ctx.cfg.has("bound.K")) {
        fail(ErrorKind::Parameter, "bound.policy = exact requires bound.K");
    }
    const double tol = ctx.cfg.number("output.tolerance", kDefaultCertifyTolerance);
    const Certification cert = certify_with(prob, ctx.cfg.number("bound.K", 0.0), policy, tol);
    write_csv(ctx.path("bound.csv"), bound_table(cert.report), ctx.preamble);
    std::ostringstream text;
    for (const auto& line : ctx.preamble) {
        text << "# " << line << '\n';
    }
    for (const auto& line : bound_constants(cert)) {
        text << line << '\n';
    }
    write_text(ctx.path("constants.txt"), text.str());
    if (verify && !cert.pass) {
        throw CertificationFailure{"min margin " + format_double(cert.report.min_margin()) +
                                   " below -" + format_double(cert.tolerance)};
    }
    return kOk;
}

int cmd_example(Context& ctx) {
    const ExampleParams params = example_params(ctx.cfg);
    const std::size_t n = ctx.cfg.integer("grid.n_points", 4096);
    const std::vector<double> cutoffs = cutoff_list(ctx.cfg);
    const double p = ctx.cfg.number("example.p", 2.0);
    ctx.preamble.push_back("grid: n_points=" + std::to_string(n) + " T=1-epsilon per row");
    const BlowupReport report = blowup_diagnostic(params, cutoffs, n, p, ctx.workers);
    write_csv(ctx.path("blowup.csv"), blowup_table(report), ctx.preamble);

    std::ostringstream text;
    for (const auto& line : ctx.preamble) {
        text << "# " << line << '\n';
    }
    try {
        const PInterval iv = admissible_p_interval(params);
        text << "p_interval = (" << format_double(iv.lo_value()) << ", "
             << format_double(iv.hi_value()) << ")\n";
    } catch (const Error& e) {
        text << "p_interval = none (" << e.what() << ")\n";
    }
    text << "exponent = " << format_double(report.exponent) << '\n'
         << "lower_bound_diverges = " << report.lower_bound_diverges << '\n'
         << "monotone = " << report.monotone << '\n'
         << "dominated = " << report.dominated << '\n'
         << "verdict = " << report.verdict << '\n';
    write_text(ctx.path("blowup.txt"), text.str());
    if (!(report.lower_bound_diverges && report.monotone && report.dominated)) {
        throw CertificationFailure{report.verdict};
    }
    return kOk;
}

int cmd_estimates(Context& ctx) {
    SuiteOptions opt;
    opt.cases = ctx.cfg.integer("estimates.cases", 50);
    opt.seed = ctx.seed;
    opt.n_points = ctx.cfg.integer("grid.n_points", 512);
    opt.workers = ctx.workers;
    ctx.preamble.push_back("grid: T=1 n_points=" + std::to_string(opt.n_points));
    std::vector<CheckRecord> records = young_suite(opt);
    const auto cor = corollary_suite(opt);
    records.insert(records.end(), cor.begin(), cor.end());
    std::ostringstream text;
    for (const auto& line : ctx.preamble) {
        text << "# " << line << '\n';
    }
    text << check_report(records);
    write_text(ctx.path("estimates.txt"), text.str());
    const auto failed = std::count_if(records.begin(), records.end(),
                                      [](const CheckRecord& r) { return !r.pass; });
    if (failed > 0) {
        throw CertificationFailure{std::to_string(failed) + " estimate check(s) failed"};
    }
    return kOk;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& reason) {
    err << "error: kind=" << kind << " reason=\"" << escape(reason) << "\"\n";
}

}  // namespace

int run(const Config& config, std::ostream& err) {
    try {
        config.require_known(kKnownKeys);
        Context ctx{config,
                    config.get("command", ""),
                    config.get("output.dir", "."),
                    config.integer("run.seed", kDefaultSeed),
                    static_cast<std::size_t>(std::max<std::uint64_t>(1, config.integer("run.workers", 1))),
                    {}};
        ctx.preamble.push_back("command: " + ctx.command);
        ctx.preamble.push_back("seed: " + std::to_string(ctx.seed));
        for (const auto& [key, value] : config.values()) {
            if (key != "output.dir" && key != "run.workers") {
                ctx.preamble.push_back("config: " + key + " = " + value);
            }
        }
        std::error_code ec;
        std::filesystem::create_directories(ctx.out, ec);
        if (ec) {
            fail(ErrorKind::Parameter, "cannot create output directory '" + ctx.out.string() + "'");
        }
        if (ctx.command == "solve") {
            return cmd_solve(ctx);
        }
        if (ctx.command == "bound") {
            return cmd_bound(ctx, false);
        }
        if (ctx.command == "verify") {
            return cmd_bound(ctx, true);
        }
        if (ctx.command == "example414") {
            return cmd_example(ctx);
        }
        if (ctx.command == "estimates") {
            return cmd_estimates(ctx);
        }
        fail(ErrorKind::Parameter, "unknown command '" + ctx.command +
                                       "' (solve, bound, verify, example414, estimates)");
    } catch (const CertificationFailure& f) {
        report_error(err, "certification", f.reason);
        return kCertificationFailure;
    } catch (const Error& e) {
        report_error(err, to_string(e.kind()), e.what());
        const bool numerical = e.kind() == ErrorKind::Divergence || e.kind() == ErrorKind::Evaluation;
        return numerical ? kNumericalFailure : kConfigError;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kNumericalFailure;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App cli{"Delayed weakly singular Volterra equations: solve, bound, verify"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::string tol;
    std::string seed;
    std::string workers;
    std::string grid;
    cli.add_option("command", command, "solve | bound | verify | example414 | estimates");
    cli.add_option("--config", config_path, "flat key = value config file");
    cli.add_option("--out", out_dir, "output directory");
    cli.add_option("--tol", tol, "certification tolerance (relative)");
    cli.add_option("--seed", seed, "64-bit seed for random selectors and suites");
    cli.add_option("--workers", workers, "worker threads for independent suite items");
    cli.add_option("--grid", grid, "number of grid cells on [0, T]");
    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(std::cerr, "parameter", e.what());
        return kConfigError;
    }

    Config cfg;
    try {
        if (!config_path.empty()) {
            cfg = Config::load(config_path);
        }
    } catch (const Error& e) {
        report_error(std::cerr, to_string(e.kind()), e.what());
        return kConfigError;
    }
    const std::pair<const std::string*, const char*> overrides[] = {
        {&command, "command"},         {&out_dir, "output.dir"}, {&tol, "output.tolerance"},
        {&seed, "run.seed"},           {&workers, "run.workers"}, {&grid, "grid.n_points"},
    };
    for (const auto& [value, key] : overrides) {
        if (!value->empty()) {
            cfg.set(key, *value);
        }
    }
    return run(cfg, std::cerr);
}

}  // namespace wsv::app
