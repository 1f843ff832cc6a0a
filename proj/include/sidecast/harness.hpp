#pragma once

#include "sidecast/fields.hpp"
#include "sidecast/kernels.hpp"
#include "sidecast/regularizer.hpp"
#include "sidecast/sinc.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sidecast {

/// Zero of the Hurwitz zeta function zeta(1/2, theta). Placing the first time
/// node at theta dt cancels the leading rectangle-rule error of a t^-1/2
/// singularity at the origin.
inline constexpr double kHurwitzOffset = 0.302721828598366374739;

/// x in [-L, L] with exp(-L^2 / 4T) < 1e-12, t_j = (j + theta) dt up to T.
GridSpec default_data_grid(double horizon = 20.0, double dx = 0.1, double dt = 0.05);

/// Figure domain: [0.25, 1.3] x [0.1, 4] for P1, [0, 1] x [0.1, 4] for P2.
Rect figure_window(ProblemId id);

/// n x n grid over figure_window(id).
GridSpec figure_grid(ProblemId id, std::size_t n = 129);

/// Data grid carrying an n x n block of nodes inside window: x nodes span
/// [x_lo, x_hi], the first row sits on t_lo with the grid's time origin at
/// kHurwitzOffset dt. The x margin covers the convolutions up to t_hi.
GridSpec residual_grid(const Rect& window, std::size_t n = 129);

/// SplitMix64 output for counter value k of the given seed.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t k);

/// Independent seed for a named sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Standard normal field: SplitMix64 words paired through Box-Muller.
RealField gaussian_noise(const GridSpec& grid, std::uint64_t seed);

/// field + noise scaled to an L2 distance of exactly epsilon. A zero draw
/// retries with seed + 1, up to 8 attempts.
RealField perturb(const RealField& field, double epsilon, std::uint64_t seed);

/// ||S*v - F|| / max(||F||, 1e-300) with F = assemble_rhs(f, g, weight),
/// measured on the nodes inside window (whole grid when absent).
double residual_eq12(const RealField& v, const RealField& f, const RealField& g,
                     const std::optional<Rect>& window = std::nullopt, double weight = kRhsWeight);

using Symbol = std::function<std::complex<double>(double z, double r)>;

struct SHatRow {
    double z;
    double r;
    std::complex<double> closed;
    std::complex<double> quadrature;
    double rel_error;
    /// 2 exp(-sqrt(r^2 + z^4)) and its distance to the closed form.
    double simplified;
    double simplified_rel;
};

struct SHatReport {
    double max_rel_error = 0.0;
    std::vector<SHatRow> rows;
    std::vector<SpectralPoint> skipped;
};

/// Closed-form symbol against (1/2pi) x the quadrature of its defining integral.
SHatReport validate_s_hat(const std::vector<SpectralPoint>& points, const KernelQuadrature& quad = {},
                          const Symbol& symbol = s_hat);

/// {0, +-1, +-2}^2.
std::vector<SpectralPoint> default_s_hat_points();

struct SincConfig {
    long N = 50;
    IndexKind kind = IndexKind::Square;
    std::size_t points = 200;
};

struct ExperimentConfig {
    ProblemId problem = ProblemId::P1;
    RegParams params;
    GridSpec data_grid = default_data_grid();
    GridSpec out_grid = figure_grid(ProblemId::P1);
    std::uint64_t seed = 42;
    /// Injected noise size; params.epsilon when absent.
    std::optional<double> noise;
    std::optional<SincConfig> sinc;
    /// Compute eta_hat (and C1 in HM mode) from the exact solution.
    bool with_tail = true;
    std::size_t spectral_nodes = 257;
    double coverage = 1.25;
};

struct SincComparison {
    SincConfig config;
    SincMesh mesh;
    SincExpansion expansion;
    /// Relative L2 deviation from direct inversion at the sample points.
    double deviation;
    /// Max |expansion - coefficient| over lattice nodes in the set.
    double node_error;
    /// Deviation of the other index set, for reporting.
    double other_deviation;
    /// d^2 sum of the square-set coefficients the triangular set drops.
    double dropped_energy;
    std::vector<double> xs;
    std::vector<double> ts;
};

struct ExperimentResult {
    RealField v_eps;
    /// Present when the exact solution is known.
    std::optional<RealField> v_exact;
    std::optional<double> measured_error;
    std::optional<double> relative_error;
    BoundReport bounds;
    CutoffRegion region;
    std::optional<SincComparison> sinc;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Reconstruction from caller-supplied data; errors are measured when v_exact is given.
ExperimentResult run_on_data(const ExperimentConfig& config, const RealField& f, const RealField& g,
                             const std::optional<Evaluator>& v_exact);

/// Sinc expansion of an existing reconstruction compared at scattered points.
SincComparison compare_sinc(const WindowedSpectrum& spectrum, const RegParams& params, const SincConfig& config,
                            const Rect& window, std::uint64_t seed);

struct ConvergenceRow {
    double epsilon;
    double measured_error;
    double bound;
    double eta_hat;
    double runtime_seconds;
};

/// One row per epsilon, sorted by descending epsilon; row k uses seed + k.
std::vector<ConvergenceRow> convergence_table(ProblemId problem, double gamma, std::vector<double> eps_list,
                                              const GridSpec& data_grid, const GridSpec& out_grid,
                                              std::uint64_t seed);

/// "epsilon,measured_error,bound,eta_hat,runtime_seconds". runtime is written
/// as 0 unless record_runtime.
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path,
                           bool record_runtime = false);

/// kappa residuals of P1 on a T = 40 data grid over D_eps(0.02, 1).
KappaCalibration calibrate_kappa_p1();

/// "nx,nt,x0,dx,t0,dt".
std::string format_grid(const GridSpec& grid);
GridSpec parse_grid(const std::string& text);

} // namespace sidecast
