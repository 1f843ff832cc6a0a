#include "sidecast/cli.hpp"

#include "sidecast/errors.hpp"
#include "sidecast/harness.hpp"
#include "sidecast/regularizer.hpp"
#include "sidecast/sinc.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace sidecast {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Manifest = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Keys a manifest carries as results; skipped when a manifest is read back as config.
const std::set<std::string>& derived_keys()
{
    static const std::set<std::string> keys{
        "command",       "kappa",       "b_eps",          "a_eps",          "d",
        "C",             "eta_hat",     "noise_term",     "bound_l2",       "C1",
        "D",             "bound_hm",    "measured_error", "relative_error", "window_z",
        "window_r",      "deviation",   "node_error",     "other_deviation", "dropped_energy",
        "rows",          "data_source"};
    return keys;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    for (const auto& [k, v] : manifest) {
        out << k << " = " << v << '\n';
    }
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

std::filesystem::path prepare_dir(const std::string& dir)
{
    std::filesystem::path p(dir.empty() ? "." : dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + p.string() + "': " + ec.message());
    }
    return p;
}

RealField read_input_field(const std::string& path)
{
    try {
        return read_field(path);
    } catch (const IoError& e) {
        throw UsageError(e.what());
    }
}

std::vector<SpectralPoint> parse_points(const std::string& text)
{
    std::vector<SpectralPoint> pts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        const auto comma = item.find(',');
        if (comma == std::string::npos) {
            throw UsageError("point '" + item + "' must be 'z,r'");
        }
        try {
            std::size_t used = 0;
            const std::string zs = trim(item.substr(0, comma));
            const std::string rs = trim(item.substr(comma + 1));
            const double z = std::stod(zs, &used);
            if (used != zs.size()) {
                throw std::invalid_argument(zs);
            }
            const double r = std::stod(rs, &used);
            if (used != rs.size()) {
                throw std::invalid_argument(rs);
            }
            pts.push_back({z, r});
        } catch (const std::logic_error&) {
            throw UsageError("point '" + item + "' must be 'z,r'");
        }
    }
    return pts;
}

std::vector<double> parse_eps_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError("bad epsilon '" + item + "' in --eps-list");
        }
    }
    if (out.empty()) {
        throw UsageError("--eps-list is empty");
    }
    return out;
}

struct RunFlags {
    std::string problem = "p1";
    std::string f_path;
    std::string g_path;
    double epsilon = 0.02;
    double gamma = 1.0;
    double m = 1.0;
    std::string mode = "l2";
    std::string grid;
    std::string data_grid;
    std::optional<double> noise;
    std::string out = ".";
    std::uint64_t seed = 42;
    std::size_t spectral_nodes = 257;
    double coverage = 1.25;
    std::string config;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool with_files)
{
    auto* problem = cmd->add_option("--problem", flags.problem, "test problem: p1 or p2")->capture_default_str();
    if (with_files) {
        auto* f = cmd->add_option("--f", flags.f_path, "GRD file with data on y = 1");
        auto* g = cmd->add_option("--g", flags.g_path, "GRD file with data on y = 2");
        f->needs(g);
        g->needs(f);
        f->excludes(problem);
        g->excludes(problem);
    }
    cmd->add_option("--epsilon", flags.epsilon, "noise level and regularization parameter")->capture_default_str();
    cmd->add_option("--gamma", flags.gamma, "exponent in (0, 2), l2 mode")->capture_default_str();
    cmd->add_option("--m", flags.m, "Sobolev order, hm mode")->capture_default_str();
    cmd->add_option("--mode", flags.mode, "l2 or hm")->capture_default_str();
    cmd->add_option("--grid", flags.grid, "output grid 'nx,nt,x0,dx,t0,dt' (default: figure domain, 129x129)");
    cmd->add_option("--data-grid", flags.data_grid, "data grid 'nx,nt,x0,dx,t0,dt' (default: T = 20, dx 0.1, dt 0.05)");
    cmd->add_option("--noise", flags.noise, "injected noise size (default: epsilon)");
    cmd->add_option("--out", flags.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", flags.seed, "noise seed")->capture_default_str();
    cmd->add_option("--spectral-nodes", flags.spectral_nodes, "spectral grid nodes per axis")->capture_default_str();
    cmd->add_option("--coverage", flags.coverage, "spectral grid span / window span")->capture_default_str();
    cmd->add_option("--config", flags.config, "key=value file; flags given on the command line win");
}

RegParams params_from(const RunFlags& flags)
{
    const auto mode = parse_reg_mode(flags.mode);
    return mode == RegMode::L2 ? RegParams::l2(flags.epsilon, flags.gamma) : RegParams::hm(flags.epsilon, flags.m);
}

struct Prepared {
    ExperimentConfig config;
    bool from_files = false;
    std::optional<RealField> f;
    std::optional<RealField> g;
};

Prepared prepare(const RunFlags& flags, std::ostream& err)
{
    Prepared p;
    auto& c = p.config;
    c.params = params_from(flags);
    if (c.params.mode == RegMode::HM) {
        err << "note: hm mode enforces eps < exp(-4 m^2) only\n";
    }
    c.seed = flags.seed;
    c.noise = flags.noise;
    c.spectral_nodes = flags.spectral_nodes;
    c.coverage = flags.coverage;
    if (flags.spectral_nodes < 2 || !(flags.coverage >= 1.0)) {
        throw UsageError("--spectral-nodes must be >= 2 and --coverage >= 1");
    }
    p.from_files = !flags.f_path.empty();
    if (p.from_files) {
        p.f = read_input_field(flags.f_path);
        p.g = read_input_field(flags.g_path);
        if (!(p.f->grid() == p.g->grid())) {
            throw UsageError("--f and --g hold fields on different grids");
        }
        c.data_grid = p.f->grid();
        if (flags.grid.empty()) {
            throw UsageError("--grid is required with --f/--g");
        }
    } else {
        c.problem = parse_problem_id(flags.problem);
        c.data_grid = flags.data_grid.empty() ? default_data_grid() : parse_grid(flags.data_grid);
    }
    c.out_grid = flags.grid.empty() ? figure_grid(c.problem) : parse_grid(flags.grid);
    if (!(c.out_grid.t0 > 0.0)) {
        throw UsageError("output grid must lie in t > 0");
    }
    return p;
}

ExperimentResult execute(const Prepared& p)
{
    if (p.from_files) {
        return run_on_data(p.config, *p.f, *p.g, std::nullopt);
    }
    return run_experiment(p.config);
}

Manifest base_manifest(const std::string& command, const RunFlags& flags, const Prepared& p)
{
    const auto& c = p.config;
    Manifest m{{"command", command}};
    if (p.from_files) {
        m.emplace_back("f", flags.f_path);
        m.emplace_back("g", flags.g_path);
    } else {
        m.emplace_back("problem", std::string(to_string(c.problem)));
    }
    m.emplace_back("mode", std::string(to_string(c.params.mode)));
    m.emplace_back("epsilon", format_number(c.params.epsilon));
    if (c.params.mode == RegMode::L2) {
        m.emplace_back("gamma", format_number(c.params.gamma));
    } else {
        m.emplace_back("m", format_number(c.params.m));
    }
    if (!p.from_files) {
        m.emplace_back("noise", format_number(c.noise.value_or(c.params.epsilon)));
        m.emplace_back("data-grid", format_grid(c.data_grid));
    }
    m.emplace_back("seed", std::to_string(c.seed));
    m.emplace_back("grid", format_grid(c.out_grid));
    m.emplace_back("spectral-nodes", std::to_string(c.spectral_nodes));
    m.emplace_back("coverage", format_number(c.coverage));
    return m;
}

void add_results(Manifest& m, const ExperimentResult& r)
{
    m.emplace_back("kappa", format_number(kKappa));
    if (r.region.b_eps) {
        m.emplace_back("b_eps", format_number(*r.region.b_eps));
    }
    if (r.region.a_eps) {
        m.emplace_back("a_eps", format_number(*r.region.a_eps));
    }
    m.emplace_back("window_z", format_number(r.region.window.zmax));
    m.emplace_back("window_r", format_number(r.region.window.rmax));
    const auto& b = r.bounds;
    m.emplace_back("C", format_number(b.C));
    m.emplace_back("eta_hat", b.eta_hat ? format_number(*b.eta_hat) : "unknown");
    if (b.noise_term) {
        m.emplace_back("noise_term", format_number(*b.noise_term));
    }
    if (b.bound_l2) {
        m.emplace_back("bound_l2", format_number(*b.bound_l2));
    }
    if (b.C1) {
        m.emplace_back("C1", format_number(*b.C1));
        m.emplace_back("D", format_number(*b.D));
        m.emplace_back("bound_hm", format_number(*b.bound_hm));
    }
    m.emplace_back("measured_error", r.measured_error ? format_number(*r.measured_error) : "unknown");
    m.emplace_back("relative_error", r.relative_error ? format_number(*r.relative_error) : "unknown");
}

void print_summary(std::ostream& out, const ExperimentResult& r)
{
    if (r.region.b_eps) {
        out << "b_eps          " << format_number(*r.region.b_eps) << '\n';
    }
    if (r.region.a_eps) {
        out << "a_eps          " << format_number(*r.region.a_eps) << '\n';
    }
    out << "kappa          " << format_number(kKappa) << '\n';
    out << "C              " << format_number(r.bounds.C) << '\n';
    if (r.bounds.eta_hat) {
        out << "eta_hat        " << format_number(*r.bounds.eta_hat) << '\n';
    }
    if (r.bounds.bound_l2) {
        out << "bound_l2       " << format_number(*r.bounds.bound_l2) << '\n';
    }
    if (r.bounds.bound_hm) {
        out << "bound_hm       " << format_number(*r.bounds.bound_hm) << '\n';
    }
    if (r.measured_error) {
        out << "measured_error " << format_number(*r.measured_error) << '\n';
        out << "relative_error " << format_number(*r.relative_error) << '\n';
    }
}

// --- verify ------------------------------------------------------------------

struct CheckTable {
    std::ostream& out;
    bool ok = true;

    void row(const std::string& name, double value, double tol, bool pass, const char* relation = "<=")
    {
        ok = ok && pass;
        out << (pass ? "PASS  " : "FAIL  ") << name << "  " << fmt("%.6g", value) << ' ' << relation << ' '
            << fmt("%.6g", tol) << '\n';
    }
};

int cmd_verify(const std::string& points_text, bool break_shat, std::ostream& out)
{
    CheckTable table{out};
    const auto points = points_text.empty() ? default_s_hat_points() : parse_points(points_text);
    Symbol symbol = s_hat;
    if (break_shat) {
        symbol = [](double z, double r) { return 1.01 * s_hat(z, r); };
    }

    const auto report = validate_s_hat(points, {}, symbol);
    out << "symbol check: closed form vs quadrature of the defining integral\n";
    out << "       z        r   |closed|      |quad|     rel.err   simplified  simpl.rel\n";
    for (const auto& row : report.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%8.3g %8.3g %11.6g %11.6g %11.3e %11.6g %10.3e\n", row.z, row.r,
                      std::abs(row.closed), std::abs(row.quadrature), row.rel_error, row.simplified,
                      row.simplified_rel);
        out << line;
    }
    for (const auto& p : report.skipped) {
        out << "skipped (" << p.z << ", " << p.r << "): closed form vanishes\n";
    }
    out << "simplified form 2exp(-sqrt(r^2+z^4)) at (2,0): " << fmt("%.6f", 2.0 * std::exp(-4.0))
        << " vs closed form " << fmt("%.6f", s_hat_abs(2.0, 0.0)) << '\n';
    table.row("S^ closed form vs quadrature (max rel)", report.max_rel_error, 1e-3, report.max_rel_error <= 1e-3);

    const double norm_s = kernel_l1_norm(KernelSpec::S());
    const double norm_r = kernel_l1_norm(KernelSpec::R());
    const double pi = std::numbers::pi;
    const double rel_s = std::abs(norm_s - 4.0 * pi) / (4.0 * pi);
    const double rel_r = std::abs(norm_r - 2.0 * pi) / (2.0 * pi);
    table.row("||S||_1 vs 4 pi (rel)", rel_s, 1e-3, rel_s <= 1e-3);
    table.row("||R||_1 vs 2 pi (rel)", rel_r, 1e-3, rel_r <= 1e-3);
    out << "C = (4 + 2||R||_1 + ||S||_1)^2 = " << format_number(bound_constant()) << '\n';

    const auto window = figure_window(ProblemId::P1);
    const auto grid = residual_grid(window);
    for (auto id : {ProblemId::P1, ProblemId::P2}) {
        const auto p = test_problem(id);
        const auto v = sample(p.v_exact, grid);
        const auto f = sample(p.f0, grid);
        const auto g = sample(p.g0, grid);
        const double res = residual_eq12(v, f, g, window);
        table.row("convolution identity residual " + std::string(to_string(id)), res, 1e-2, res <= 1e-2);
        if (id == ProblemId::P1) {
            out << "info  residual with weight 4 on f instead of 4 pi: "
                << fmt("%.6g", residual_eq12(v, f, g, window, 4.0)) << '\n';
        }
    }

    const auto cal = calibrate_kappa_p1();
    out << "kappa residual: kappa = 1 -> " << fmt("%.6g", cal.residual_one) << ", kappa = 2 pi -> "
        << fmt("%.6g", cal.residual_two_pi) << '\n';
    table.row("kappa = 2 pi advantage over kappa = 1", cal.ratio(), 10.0, cal.ratio() >= 10.0, ">=");

    out << (table.ok ? "all checks passed\n" : "some checks FAILED\n");
    return table.ok ? kExitOk : kExitFailure;
}

// --- config handling -----------------------------------------------------------

std::optional<std::string> find_config(const std::vector<std::string>& args)
{
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            return args[k + 1];
        }
        if (args[k].rfind("--config=", 0) == 0) {
            return args[k].substr(9);
        }
    }
    return std::nullopt;
}

// Tokens for the config file, placed before the command-line flags so the
// latter win under TakeLast.
std::vector<std::string> config_tokens(const std::filesystem::path& path, CLI::App* cmd)
{
    std::map<std::string, std::string> entries;
    try {
        entries = read_key_values(path);
    } catch (const IoError& e) {
        throw UsageError(e.what());
    }
    std::vector<std::string> tokens;
    for (const auto& [key, value] : entries) {
        if (derived_keys().count(key) || key == "config") {
            continue;
        }
        const auto* opt = cmd->get_option_no_throw("--" + key);
        if (!opt) {
            throw UsageError("config file '" + path.string() + "': unknown key '" + key + "'");
        }
        if (opt->get_type_size() == 0) {
            if (value == "true" || value == "1") {
                tokens.push_back("--" + key);
            } else if (value != "false" && value != "0") {
                throw UsageError("config file '" + path.string() + "': '" + key + "' takes true or false");
            }
            continue;
        }
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

} // namespace

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string(), lineno, "expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) {
            throw ParseError(path.string(), lineno, "empty key");
        }
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Surface temperature of a conducting strip from two interior temperature histories"};
    app.name(argc > 0 ? std::filesystem::path(argv[0]).filename().string() : "sidecast");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string points_text;
    bool break_shat = false;
    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "run the oracle checks and print a PASS/FAIL table");
    verify->add_option("--points", points_text, "restrict the symbol check to 'z,r;z,r;...'");
    verify->add_flag("--break-shat", break_shat, "perturb the closed-form symbol (fault injection)")->group("");
    verify->add_option("--config", verify_config, "key=value file");

    RunFlags rec_flags;
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "regularized reconstruction of v(x, t)");
    add_run_flags(reconstruct_cmd, rec_flags, true);

    RunFlags sinc_flags;
    long sinc_n = 50;
    std::string index_set = "square";
    std::string v_eps_path;
    std::size_t sample_points = 200;
    auto* sinc_cmd = app.add_subcommand("sinc", "Sinc expansion of the reconstruction");
    add_run_flags(sinc_cmd, sinc_flags, true);
    sinc_cmd->add_option("--N", sinc_n, "truncation order, N >= 1")->capture_default_str();
    sinc_cmd->add_option("--index-set", index_set, "square or triangular")->capture_default_str();
    sinc_cmd->add_option("--v-eps", v_eps_path, "GRD file of v_eps sampled on the Sinc lattice");
    sinc_cmd->add_option("--sample-points", sample_points, "off-node comparison points")->capture_default_str();

    RunFlags conv_flags;
    std::string eps_list_text;
    bool record_runtime = false;
    auto* conv_cmd = app.add_subcommand("convergence", "measured error and bound over a list of epsilon");
    add_run_flags(conv_cmd, conv_flags, false);
    conv_cmd->add_option("--eps-list", eps_list_text, "comma-separated epsilon values")->required();
    conv_cmd->add_flag("--record-runtime", record_runtime, "write wall-clock seconds into the CSV");

    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    try {
        // Splice config tokens in right after the subcommand name.
        if (!args.empty()) {
            if (auto path = find_config(args)) {
                CLI::App* cmd = nullptr;
                for (auto* sub : {verify, reconstruct_cmd, sinc_cmd, conv_cmd}) {
                    if (sub->check_name(args.front())) {
                        cmd = sub;
                    }
                }
                if (cmd) {
                    auto tokens = config_tokens(*path, cmd);
                    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
                }
            }
        }
        std::vector<const char*> cargv{argc > 0 ? argv[0] : "sidecast"};
        for (const auto& a : args) {
            cargv.push_back(a.c_str());
        }
        try {
            app.parse(static_cast<int>(cargv.size()), cargv.data());
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::ParseError& e) {
            app.exit(e, out, err);
            return kExitUsage;
        }

        if (verify->parsed()) {
            return cmd_verify(points_text, break_shat, out);
        }

        if (reconstruct_cmd->parsed()) {
            const auto p = prepare(rec_flags, err);
            const auto result = execute(p);
            const auto dir = prepare_dir(rec_flags.out);
            write_field(result.v_eps, dir / "v_eps.grd");
            write_csv(result.v_eps, dir / "v_eps.csv");
            auto manifest = base_manifest("reconstruct", rec_flags, p);
            add_results(manifest, result);
            write_manifest(manifest, dir / "manifest.txt");
            print_summary(out, result);
            out << "wrote " << (dir / "v_eps.grd").string() << ", v_eps.csv, manifest.txt\n";
            return kExitOk;
        }

        if (sinc_cmd->parsed()) {
            if (sinc_n < 1) {
                throw UsageError("--N must be >= 1");
            }
            const auto kind = parse_index_kind(index_set);
            const auto dir_name = sinc_flags.out;
            if (!v_eps_path.empty()) {
                const auto lattice = read_input_field(v_eps_path);
                SincExpansion expansion = [&] {
                    try {
                        return build_expansion(lattice, kind);
                    } catch (const GridMismatch& e) {
                        throw UsageError(std::string("--v-eps: ") + e.what());
                    }
                }();
                const auto grid = sinc_flags.grid.empty() ? figure_grid(ProblemId::P1) : parse_grid(sinc_flags.grid);
                const auto dir = prepare_dir(dir_name);
                write_expansion(expansion, dir / "expansion.txt");
                write_csv(eval_expansion(expansion, grid), dir / "sinc_eval.csv");
                Manifest m{{"command", "sinc"},
                           {"v-eps", v_eps_path},
                           {"N", std::to_string(expansion.index_set().N)},
                           {"index-set", std::string(to_string(kind))},
                           {"grid", format_grid(grid)},
                           {"d", format_number(expansion.d())}};
                write_manifest(m, dir / "manifest.txt");
                out << "d              " << format_number(expansion.d()) << '\n';
                out << "deviation      n/a (no direct evaluation for a lattice file)\n";
                if (kind == IndexKind::Triangular) {
                    const auto full = build_expansion(lattice, IndexKind::Square);
                    out << "dropped_energy " << format_number(dropped_index_energy(full, IndexKind::Triangular))
                        << '\n';
                }
                return kExitOk;
            }
            auto p = prepare(sinc_flags, err);
            p.config.sinc = SincConfig{sinc_n, kind, sample_points};
            const auto result = execute(p);
            const auto& s = *result.sinc;
            const auto dir = prepare_dir(dir_name);
            write_field(result.v_eps, dir / "v_eps.grd");
            write_expansion(s.expansion, dir / "expansion.txt");
            write_csv(eval_expansion(s.expansion, p.config.out_grid), dir / "sinc_eval.csv");
            auto manifest = base_manifest("sinc", sinc_flags, p);
            manifest.emplace_back("N", std::to_string(sinc_n));
            manifest.emplace_back("index-set", std::string(to_string(kind)));
            manifest.emplace_back("sample-points", std::to_string(sample_points));
            add_results(manifest, result);
            manifest.emplace_back("d", format_number(s.mesh.d));
            manifest.emplace_back("deviation", format_number(s.deviation));
            manifest.emplace_back("node_error", format_number(s.node_error));
            manifest.emplace_back("other_deviation", format_number(s.other_deviation));
            if (kind == IndexKind::Triangular) {
                manifest.emplace_back("dropped_energy", format_number(s.dropped_energy));
            }
            write_manifest(manifest, dir / "manifest.txt");
            print_summary(out, result);
            out << "sinc mesh a    " << format_number(s.mesh.a) << "  d = " << format_number(s.mesh.d) << '\n';
            out << "deviation      " << format_number(s.deviation) << " (" << to_string(kind)
                << ", relative L2 vs direct inversion at " << s.xs.size() << " points)\n";
            out << "other set      " << format_number(s.other_deviation) << '\n';
            out << "node_error     " << format_number(s.node_error) << '\n';
            if (kind == IndexKind::Triangular) {
                out << "dropped_energy " << format_number(s.dropped_energy) << '\n';
            }
            return kExitOk;
        }

        if (conv_cmd->parsed()) {
            const auto eps = parse_eps_list(eps_list_text);
            if (parse_reg_mode(conv_flags.mode) != RegMode::L2) {
                throw UsageError("convergence runs in l2 mode only");
            }
            for (double e : eps) {
                RegParams::l2(e, conv_flags.gamma);
            }
            const auto problem = parse_problem_id(conv_flags.problem);
            const auto data_grid = conv_flags.data_grid.empty() ? default_data_grid() : parse_grid(conv_flags.data_grid);
            const auto out_grid = conv_flags.grid.empty() ? figure_grid(problem) : parse_grid(conv_flags.grid);
            const auto rows = convergence_table(problem, conv_flags.gamma, eps, data_grid, out_grid, conv_flags.seed);
            const auto dir = prepare_dir(conv_flags.out);
            write_convergence_csv(rows, dir / "convergence.csv", record_runtime);
            Manifest m{{"command", "convergence"},
                       {"problem", std::string(to_string(problem))},
                       {"gamma", format_number(conv_flags.gamma)},
                       {"eps-list", eps_list_text},
                       {"seed", std::to_string(conv_flags.seed)},
                       {"data-grid", format_grid(data_grid)},
                       {"grid", format_grid(out_grid)},
                       {"kappa", format_number(kKappa)},
                       {"C", format_number(bound_constant())},
                       {"rows", std::to_string(rows.size())}};
            if (record_runtime) {
                m.emplace_back("record-runtime", "true");
            }
            write_manifest(m, dir / "manifest.txt");
            bool ok = true;
            out << "   epsilon  measured_error        bound      eta_hat   seconds\n";
            for (const auto& r : rows) {
                char line[160];
                std::snprintf(line, sizeof line, "%10.4g %15.6g %12.6g %12.6g %9.2f%s\n", r.epsilon, r.measured_error,
                              r.bound, r.eta_hat, r.runtime_seconds, r.measured_error <= r.bound ? "" : "  BOUND VIOLATED");
                out << line;
                ok = ok && r.measured_error <= r.bound;
            }
            return ok ? kExitOk : kExitFailure;
        }
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const GridMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace sidecast
