#pragma once

#include "sidecast/fields.hpp"
#include "sidecast/kernels.hpp"
#include "sidecast/transform.hpp"

#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace sidecast {

enum class RegMode { L2, HM };

RegMode parse_reg_mode(std::string_view name);
std::string_view to_string(RegMode mode);

/// Regularization inputs. gamma is read in L2 mode, m in HM mode.
struct RegParams {
    double epsilon = 0.02;
    double gamma = 1.0;
    RegMode mode = RegMode::L2;
    double m = 1.0;

    static RegParams l2(double epsilon, double gamma);
    static RegParams hm(double epsilon, double m);

    /// L2: 0 < eps < exp(-3/gamma), 0 < gamma < 2.
    /// HM: 0 < eps < exp(-4 m^2), m > 0, a_eps > 1.
    /// Throws ParameterError quoting the admissible range.
    void validate() const;
};

/// b_eps = ln(4 / eps^gamma) / (sqrt(2) sqrt(sqrt(2) + 1)).
double cutoff_l2(double epsilon, double gamma);

/// a_eps = sqrt(2) / sqrt(sqrt(2) + 1) * ln((1/eps) / ln^m(1/eps)).
double cutoff_hm(double epsilon, double m);

struct CutoffRegion {
    SpectralWindow window;
    std::optional<double> b_eps;
    std::optional<double> a_eps;
};

/// D_eps = {|z| <= b, |r| <= b^2} in L2 mode, Q_eps = [-a, a]^2 in HM mode.
CutoffRegion cutoff_region(const RegParams& params);

/// Convolution constant of the symmetric transform: dft2(K * w) = kKappa K^ w^.
inline constexpr double kKappa = 2.0 * std::numbers::pi;

/// Weight on f in the assembled right-hand side.
inline constexpr double kRhsWeight = 4.0 * std::numbers::pi;

/// F = 2 R*f - S*g + weight f on f's grid.
RealField assemble_rhs(const RealField& f, const RealField& g, double weight = kRhsWeight);

/// F^ / (kappa S^) on nodes inside the window, exactly 0 elsewhere.
ComplexField spectral_division(const ComplexField& f_hat, const CutoffRegion& region, double kappa = kKappa);

/// Smallest |S^| over spectral nodes inside the window.
double divisor_floor(const GridSpec& spectral, const SpectralWindow& window);

/// (4 + 2||R||_1 + ||S||_1)^2 with the norms from kernel_l1_norm.
double bound_constant();

/// sqrt(C eps^(2 - gamma) + eta_hat). Throws ParameterError on invalid inputs.
double error_bound_l2(double epsilon, double gamma, double eta_hat);

/// sqrt(C1 (1 + 2^m)) (ln 1/eps)^-m. Throws ParameterError unless C1 > 0.
double error_bound_hm(double epsilon, double m, double c1);

/// Rectangle-rule integral of |v0^|^2 over covered nodes outside the window.
double tail_energy(const ComplexField& v0_hat, const CutoffRegion& region);

/// Rectangle-rule integral of (z^2 + r^2)^m |v0^|^2 over the covered grid.
double hm_constant_c1(const ComplexField& v0_hat, double m);

struct BoundReport {
    double C = 0.0;
    /// sqrt(C eps^(2 - gamma)); L2 mode only.
    std::optional<double> noise_term;
    /// Absent unless the exact solution was supplied.
    std::optional<double> eta_hat;
    /// sqrt(C eps^(2 - gamma) + eta_hat), eta_hat taken as 0 when unknown.
    std::optional<double> bound_l2;
    std::optional<double> C1;
    std::optional<double> D;
    std::optional<double> bound_hm;
};

struct ReconstructOptions {
    std::size_t spectral_nodes = 257;
    double coverage = 1.25;
    /// Exact solution, for eta_hat and C1 (validation runs only).
    std::optional<Evaluator> v0;
    std::size_t tail_nodes = 513;
    double tail_coverage = 4.0;
};

struct Reconstruction {
    RealField v_eps;
    BoundReport bounds;
    CutoffRegion region;
    WindowedSpectrum spectrum;
};

/// assemble_rhs -> dft2_forward -> spectral_division -> idft2_windowed onto out_grid.
Reconstruction reconstruct(const RealField& f, const RealField& g, const RegParams& params,
                           const GridSpec& out_grid, const ReconstructOptions& options = {});

/// ||F^ - kappa S^ v0^|| / ||F^|| over spectral nodes inside the window.
double kappa_residual(const ComplexField& f_hat, const ComplexField& v0_hat, const SpectralWindow& window,
                      double kappa);

struct KappaCalibration {
    double residual_one;
    double residual_two_pi;
    double ratio() const { return residual_one / residual_two_pi; }
};

/// Spectral residual of F = assemble_rhs(f, g) against the transform of v0 for
/// kappa = 1 and kappa = 2 pi.
KappaCalibration calibrate_kappa(const RealField& f, const RealField& g, const RealField& v0,
                                 const SpectralWindow& window, std::size_t spectral_nodes = 257,
                                 double coverage = 1.25);

} // namespace sidecast
