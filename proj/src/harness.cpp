#include "sidecast/harness.hpp"

#include "sidecast/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sidecast {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// (0, 1], 53-bit resolution
double unit_open_closed(std::uint64_t word)
{
    return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

// [0, 1), 53-bit resolution
double unit_closed_open(std::uint64_t word)
{
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

std::size_t count_steps(double span, double step)
{
    return static_cast<std::size_t>(std::ceil(span / step - 1e-9));
}

} // namespace

GridSpec default_data_grid(double horizon, double dx, double dt)
{
    if (!(horizon > 0.0) || !(dx > 0.0) || !(dt > 0.0)) {
        throw ParameterError("data grid needs positive horizon and steps");
    }
    const std::size_t half = count_steps(gaussian_cutoff(horizon), dx);
    const auto nt = static_cast<std::size_t>(std::llround(horizon / dt));
    GridSpec g{-static_cast<double>(half) * dx, dx, 2 * half + 1, kHurwitzOffset * dt, dt, nt};
    g.validate();
    return g;
}

Rect figure_window(ProblemId id)
{
    return id == ProblemId::P1 ? Rect{0.25, 1.3, 0.1, 4.0} : Rect{0.0, 1.0, 0.1, 4.0};
}

GridSpec figure_grid(ProblemId id, std::size_t n)
{
    const auto w = figure_window(id);
    return grid_over(w.x_lo, w.x_hi, n, w.t_lo, w.t_hi, n);
}

GridSpec residual_grid(const Rect& window, std::size_t n)
{
    if (!(window.t_lo > 0.0) || !(window.t_hi > window.t_lo) || n < 2) {
        throw ParameterError("residual window must satisfy 0 < t_lo < t_hi");
    }
    const double dx = (window.x_hi - window.x_lo) / static_cast<double>(n - 1);
    // Row j0 sits on t_lo with the first node at kHurwitzOffset * dt; take the
    // smallest j0 that still fits n rows below t_hi.
    std::size_t j0 = 0;
    double dt = window.t_lo / kHurwitzOffset;
    while (window.t_lo + static_cast<double>(n - 1) * dt > window.t_hi) {
        ++j0;
        dt = window.t_lo / (static_cast<double>(j0) + kHurwitzOffset);
    }
    const double t0 = kHurwitzOffset * dt;
    const std::size_t margin = count_steps(gaussian_cutoff(window.t_hi - t0), dx) + 1;
    GridSpec g{window.x_lo - static_cast<double>(margin) * dx, dx, n + 2 * margin, t0, dt, j0 + n};
    g.validate();
    return g;
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t k)
{
    return mix64(seed + (k + 1) * kGolden);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return mix64(seed ^ mix64(stream + kGolden));
}

RealField gaussian_noise(const GridSpec& grid, std::uint64_t seed)
{
    grid.validate();
    std::vector<double> values(grid.size());
    for (std::size_t n = 0; n < values.size(); n += 2) {
        const std::uint64_t pair = n / 2;
        const double u1 = unit_open_closed(splitmix64(seed, 2 * pair));
        const double u2 = unit_closed_open(splitmix64(seed, 2 * pair + 1));
        const double radius = std::sqrt(-2.0 * std::log(u1));
        values[n] = radius * std::cos(2.0 * kPi * u2);
        if (n + 1 < values.size()) {
            values[n + 1] = radius * std::sin(2.0 * kPi * u2);
        }
    }
    return RealField(grid, std::move(values));
}

RealField perturb(const RealField& field, double epsilon, std::uint64_t seed)
{
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw ParameterError("noise level must be finite and >= 0 (got " + format_number(epsilon) + ")");
    }
    if (epsilon == 0.0) {
        return field;
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
        const auto noise = gaussian_noise(field.grid(), seed + static_cast<std::uint64_t>(attempt));
        const double norm = l2_norm(noise);
        if (norm > 0.0) {
            return field + (epsilon / norm) * noise;
        }
    }
    throw NumericError("noise generator produced 8 zero draws");
}

double residual_eq12(const RealField& v, const RealField& f, const RealField& g, const std::optional<Rect>& window,
                     double weight)
{
    if (!(v.grid() == f.grid()) || !(v.grid() == g.grid())) {
        throw GridMismatch("v, f and g must share a grid");
    }
    const auto lhs = convolve2_causal(KernelSpec::S(), v, v.grid());
    const auto rhs = assemble_rhs(f, g, weight);
    auto diff = lhs - rhs;
    auto ref = rhs;
    if (window) {
        diff = crop(diff, *window);
        ref = crop(ref, *window);
    }
    return l2_norm(diff) / std::max(l2_norm(ref), 1e-300);
}

std::vector<SpectralPoint> default_s_hat_points()
{
    std::vector<SpectralPoint> pts;
    for (int z = -2; z <= 2; ++z) {
        for (int r = -2; r <= 2; ++r) {
            pts.push_back({static_cast<double>(z), static_cast<double>(r)});
        }
    }
    return pts;
}

SHatReport validate_s_hat(const std::vector<SpectralPoint>& points, const KernelQuadrature& quad, const Symbol& symbol)
{
    SHatReport report;
    if (points.empty()) {
        return report;
    }
    const auto raw = kernel_fourier_quadrature(KernelSpec::S(), points, quad);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const auto [z, r] = points[p];
        const auto closed = symbol(z, r);
        if (std::abs(closed) == 0.0) {
            report.skipped.push_back(points[p]);
            continue;
        }
        const auto q = raw[p] / (2.0 * kPi);
        const double simplified = 2.0 * std::exp(-std::sqrt(r * r + z * z * z * z));
        SHatRow row{z, r, closed, q, std::abs(q - closed) / std::abs(closed), simplified,
                    std::abs(simplified - closed) / std::abs(closed)};
        report.max_rel_error = std::max(report.max_rel_error, row.rel_error);
        report.rows.push_back(row);
    }
    return report;
}

SincComparison compare_sinc(const WindowedSpectrum& spectrum, const RegParams& params, const SincConfig& config,
                            const Rect& window, std::uint64_t seed)
{
    if (config.N < 1) {
        throw ParameterError("truncation N must be >= 1");
    }
    const auto mesh = sinc_mesh(params);
    const auto lattice = spectrum.on_grid(sinc_lattice(config.N, mesh.d));
    auto expansion = build_expansion(lattice, config.kind);
    const auto full = build_expansion(lattice, IndexKind::Square);
    const auto other = build_expansion(
        lattice, config.kind == IndexKind::Square ? IndexKind::Triangular : IndexKind::Square);

    std::vector<double> xs(config.points);
    std::vector<double> ts(config.points);
    const auto stream = derive_seed(seed, 2);
    for (std::size_t p = 0; p < config.points; ++p) {
        xs[p] = window.x_lo + (window.x_hi - window.x_lo) * unit_closed_open(splitmix64(stream, 2 * p));
        ts[p] = window.t_lo + (window.t_hi - window.t_lo) * unit_closed_open(splitmix64(stream, 2 * p + 1));
    }
    const auto direct = spectrum.at_points(xs, ts);
    auto deviation_of = [&](const SincExpansion& e) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t p = 0; p < xs.size(); ++p) {
            const double diff = e(xs[p], ts[p]) - direct[p];
            num += diff * diff;
            den += direct[p] * direct[p];
        }
        return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    };

    double node_error = 0.0;
    const long N = config.N;
    for (long n = -N; n <= N; ++n) {
        for (long m = -N; m <= N; ++m) {
            if (expansion.index_set().contains(m, n)) {
                const double at_node = expansion(static_cast<double>(m) * mesh.d, static_cast<double>(n) * mesh.d);
                node_error = std::max(node_error, std::abs(at_node - expansion.coeff(m, n)));
            }
        }
    }
    const double deviation = deviation_of(expansion);
    const double other_deviation = deviation_of(other);
    return SincComparison{config,
                          mesh,
                          std::move(expansion),
                          deviation,
                          node_error,
                          other_deviation,
                          dropped_index_energy(full, IndexKind::Triangular),
                          std::move(xs),
                          std::move(ts)};
}

ExperimentResult run_on_data(const ExperimentConfig& config, const RealField& f, const RealField& g,
                             const std::optional<Evaluator>& v_exact)
{
    ReconstructOptions options;
    options.spectral_nodes = config.spectral_nodes;
    options.coverage = config.coverage;
    if (config.with_tail && v_exact) {
        options.v0 = *v_exact;
    }
    auto rec = reconstruct(f, g, config.params, config.out_grid, options);
    ExperimentResult result{std::move(rec.v_eps), std::nullopt, std::nullopt, std::nullopt, rec.bounds, rec.region,
                            std::nullopt};
    if (v_exact) {
        auto exact = sample(*v_exact, config.out_grid);
        result.measured_error = l2_distance(result.v_eps, exact);
        result.relative_error = *result.measured_error / std::max(l2_norm(exact), 1e-300);
        result.v_exact = std::move(exact);
    }
    if (config.sinc) {
        const auto& og = config.out_grid;
        const Rect points{og.x0, og.x_last(), std::max(og.t0, 0.5), og.t_last()};
        result.sinc = compare_sinc(rec.spectrum, config.params, *config.sinc, points, config.seed);
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.params.validate();
    config.data_grid.validate();
    config.out_grid.validate();
    if (config.out_grid.t0 <= 0.0) {
        throw ParameterError("output grid must lie in t > 0");
    }
    const auto problem = test_problem(config.problem);
    const double noise = config.noise.value_or(config.params.epsilon);
    const auto f = perturb(sample(problem.f0, config.data_grid), noise, derive_seed(config.seed, 0));
    const auto g = perturb(sample(problem.g0, config.data_grid), noise, derive_seed(config.seed, 1));
    return run_on_data(config, f, g, problem.v_exact);
}

std::vector<ConvergenceRow> convergence_table(ProblemId problem, double gamma, std::vector<double> eps_list,
                                              const GridSpec& data_grid, const GridSpec& out_grid,
                                              std::uint64_t seed)
{
    if (eps_list.empty()) {
        throw ParameterError("epsilon list is empty");
    }
    for (double eps : eps_list) {
        RegParams::l2(eps, gamma);
    }
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    std::vector<ConvergenceRow> rows;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        ExperimentConfig config;
        config.problem = problem;
        config.params = RegParams::l2(eps_list[k], gamma);
        config.data_grid = data_grid;
        config.out_grid = out_grid;
        config.seed = seed + k;
        const auto result = run_experiment(config);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        rows.push_back(ConvergenceRow{eps_list[k], result.measured_error.value(), result.bounds.bound_l2.value(),
                                      result.bounds.eta_hat.value_or(0.0), elapsed.count()});
    }
    return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path,
                           bool record_runtime)
{
    if (path.empty()) {
        throw IoError("empty output path");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << "epsilon,measured_error,bound,eta_hat,runtime_seconds\n";
    for (const auto& row : rows) {
        out << format_number(row.epsilon) << ',' << format_number(row.measured_error) << ','
            << format_number(row.bound) << ',' << format_number(row.eta_hat) << ','
            << format_number(record_runtime ? row.runtime_seconds : 0.0) << '\n';
    }
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

KappaCalibration calibrate_kappa_p1()
{
    const auto grid = default_data_grid(40.0);
    const auto p1 = test_problem(ProblemId::P1);
    const auto region = cutoff_region(RegParams::l2(0.02, 1.0));
    return calibrate_kappa(sample(p1.f0, grid), sample(p1.g0, grid), sample(p1.v_exact, grid), region.window);
}

std::string format_grid(const GridSpec& grid)
{
    return std::to_string(grid.nx) + "," + std::to_string(grid.nt) + "," + format_number(grid.x0) + ","
           + format_number(grid.dx) + "," + format_number(grid.t0) + "," + format_number(grid.dt);
}

GridSpec parse_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        parts.push_back(item);
    }
    if (parts.size() != 6) {
        throw ParameterError("grid must be 'nx,nt,x0,dx,t0,dt' (got '" + text + "')");
    }
    try {
        std::size_t used = 0;
        auto count = [&](const std::string& s) {
            const long v = std::stol(s, &used);
            if (used != s.size() || v < 0) {
                throw std::invalid_argument(s);
            }
            return static_cast<std::size_t>(v);
        };
        auto real = [&](const std::string& s) {
            const double v = std::stod(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
            return v;
        };
        GridSpec g{real(parts[2]), real(parts[3]), count(parts[0]), real(parts[4]), real(parts[5]), count(parts[1])};
        g.validate();
        return g;
    } catch (const GridMismatch& e) {
        throw ParameterError(e.what());
    } catch (const std::logic_error&) {
        throw ParameterError("grid must be 'nx,nt,x0,dx,t0,dt' (got '" + text + "')");
    }
}

} // namespace sidecast
