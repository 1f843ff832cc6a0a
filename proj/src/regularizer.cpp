#include "sidecast/regularizer.hpp"

#include "sidecast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sidecast {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kRoot = std::sqrt(kSqrt2 + 1.0);

void require_positive_finite(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be positive and finite (got " + format_number(v) + ")");
    }
}

void check_l2(double epsilon, double gamma)
{
    if (!(gamma > 0.0 && gamma < 2.0)) {
        throw ParameterError("gamma must lie in (0, 2) (got " + format_number(gamma) + ")");
    }
    require_positive_finite(epsilon, "epsilon");
    const double limit = std::exp(-3.0 / gamma);
    if (!(epsilon < limit)) {
        throw ParameterError("epsilon must lie in (0, exp(-3/gamma)) = (0, " + format_number(limit)
                             + ") (got " + format_number(epsilon) + ")");
    }
}

double hm_formula(double epsilon, double m)
{
    const double inv = std::log(1.0 / epsilon);
    return kSqrt2 / kRoot * (inv - m * std::log(inv));
}

void check_hm(double epsilon, double m)
{
    require_positive_finite(m, "m");
    require_positive_finite(epsilon, "epsilon");
    const double limit = std::exp(-4.0 * m * m);
    if (!(epsilon < limit)) {
        throw ParameterError("epsilon must lie in (0, exp(-4 m^2)) = (0, " + format_number(limit) + ") (got "
                             + format_number(epsilon) + ")");
    }
    const double a = hm_formula(epsilon, m);
    if (!(a > 1.0)) {
        throw ParameterError("cutoff a_eps = " + format_number(a) + " must exceed 1");
    }
}

double window_sum(const ComplexField& field, const SpectralWindow& window, bool inside,
                  const std::function<double(double, double, std::complex<double>)>& term)
{
    const auto& g = field.grid();
    double acc = 0.0;
    for (std::size_t l = 0; l < g.nt; ++l) {
        for (std::size_t k = 0; k < g.nx; ++k) {
            if (window.contains(g.x(k), g.t(l)) == inside) {
                acc += term(g.x(k), g.t(l), field.at(k, l));
            }
        }
    }
    return acc;
}

} // namespace

RegMode parse_reg_mode(std::string_view name)
{
    if (name == "l2" || name == "L2") {
        return RegMode::L2;
    }
    if (name == "hm" || name == "HM") {
        return RegMode::HM;
    }
    throw ParameterError("unknown mode '" + std::string(name) + "' (expected l2 or hm)");
}

std::string_view to_string(RegMode mode)
{
    return mode == RegMode::L2 ? "l2" : "hm";
}

RegParams RegParams::l2(double epsilon, double gamma)
{
    RegParams p{epsilon, gamma, RegMode::L2, 1.0};
    p.validate();
    return p;
}

RegParams RegParams::hm(double epsilon, double m)
{
    RegParams p{epsilon, 1.0, RegMode::HM, m};
    p.validate();
    return p;
}

void RegParams::validate() const
{
    if (mode == RegMode::L2) {
        check_l2(epsilon, gamma);
    } else {
        check_hm(epsilon, m);
    }
}

double cutoff_l2(double epsilon, double gamma)
{
    check_l2(epsilon, gamma);
    return std::log(4.0 / std::pow(epsilon, gamma)) / (kSqrt2 * kRoot);
}

double cutoff_hm(double epsilon, double m)
{
    check_hm(epsilon, m);
    return hm_formula(epsilon, m);
}

CutoffRegion cutoff_region(const RegParams& params)
{
    params.validate();
    if (params.mode == RegMode::L2) {
        const double b = cutoff_l2(params.epsilon, params.gamma);
        return CutoffRegion{SpectralWindow::rect(b, b * b), b, std::nullopt};
    }
    const double a = cutoff_hm(params.epsilon, params.m);
    return CutoffRegion{SpectralWindow::square(a), std::nullopt, a};
}

RealField assemble_rhs(const RealField& f, const RealField& g, double weight)
{
    if (!(f.grid() == g.grid())) {
        throw GridMismatch("f and g must share a grid");
    }
    const auto rf = convolve2_causal(KernelSpec::R(), f, f.grid());
    const auto sg = convolve2_causal(KernelSpec::S(), g, g.grid());
    return 2.0 * rf - sg + weight * f;
}

ComplexField spectral_division(const ComplexField& f_hat, const CutoffRegion& region, double kappa)
{
    const auto& g = f_hat.grid();
    require_coverage(g, region.window);
    std::vector<std::complex<double>> out(g.size());
    for (std::size_t l = 0; l < g.nt; ++l) {
        for (std::size_t k = 0; k < g.nx; ++k) {
            if (region.window.contains(g.x(k), g.t(l))) {
                out[l * g.nx + k] = f_hat.at(k, l) / (kappa * s_hat(g.x(k), g.t(l)));
            }
        }
    }
    return ComplexField(g, std::move(out));
}

double divisor_floor(const GridSpec& spectral, const SpectralWindow& window)
{
    require_coverage(spectral, window);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < spectral.nt; ++l) {
        for (std::size_t k = 0; k < spectral.nx; ++k) {
            if (window.contains(spectral.x(k), spectral.t(l))) {
                lowest = std::min(lowest, s_hat_abs(spectral.x(k), spectral.t(l)));
            }
        }
    }
    return lowest;
}

double bound_constant()
{
    const double v = 4.0 + 2.0 * kernel_l1_norm(KernelSpec::R()) + kernel_l1_norm(KernelSpec::S());
    return v * v;
}

double error_bound_l2(double epsilon, double gamma, double eta_hat)
{
    check_l2(epsilon, gamma);
    if (!(eta_hat >= 0.0) || !std::isfinite(eta_hat)) {
        throw ParameterError("eta_hat must be finite and >= 0 (got " + format_number(eta_hat) + ")");
    }
    return std::sqrt(bound_constant() * std::pow(epsilon, 2.0 - gamma) + eta_hat);
}

double error_bound_hm(double epsilon, double m, double c1)
{
    check_hm(epsilon, m);
    require_positive_finite(c1, "C1");
    const double d = std::sqrt(c1 * (1.0 + std::pow(2.0, m)));
    return d * std::pow(std::log(1.0 / epsilon), -m);
}

double tail_energy(const ComplexField& v0_hat, const CutoffRegion& region)
{
    require_coverage(v0_hat.grid(), region.window);
    const double sum = window_sum(v0_hat, region.window, false,
                                  [](double, double, std::complex<double> v) { return std::norm(v); });
    return sum * v0_hat.grid().cell_area();
}

double hm_constant_c1(const ComplexField& v0_hat, double m)
{
    require_positive_finite(m, "m");
    const auto& g = v0_hat.grid();
    double acc = 0.0;
    for (std::size_t l = 0; l < g.nt; ++l) {
        for (std::size_t k = 0; k < g.nx; ++k) {
            const double rho2 = g.x(k) * g.x(k) + g.t(l) * g.t(l);
            acc += std::pow(rho2, m) * std::norm(v0_hat.at(k, l));
        }
    }
    return acc * g.cell_area();
}

Reconstruction reconstruct(const RealField& f, const RealField& g, const RegParams& params,
                           const GridSpec& out_grid, const ReconstructOptions& options)
{
    const auto region = cutoff_region(params);
    out_grid.validate();
    const auto rhs = assemble_rhs(f, g);
    const auto spectral = spectral_grid_for(region.window, options.spectral_nodes, options.coverage);
    const auto v_hat = spectral_division(dft2_forward(rhs, spectral), region);
    WindowedSpectrum spectrum(v_hat, region.window);
    auto v_eps = spectrum.on_grid(out_grid);

    BoundReport report;
    report.C = bound_constant();
    std::optional<ComplexField> v0_hat;
    if (options.v0) {
        const auto tail_grid = spectral_grid_for(region.window, options.tail_nodes, options.tail_coverage);
        v0_hat = dft2_forward(sample(*options.v0, f.grid()), tail_grid);
        report.eta_hat = tail_energy(*v0_hat, region);
    }
    if (params.mode == RegMode::L2) {
        report.noise_term = std::sqrt(report.C * std::pow(params.epsilon, 2.0 - params.gamma));
        report.bound_l2 = error_bound_l2(params.epsilon, params.gamma, report.eta_hat.value_or(0.0));
    } else if (v0_hat) {
        report.C1 = hm_constant_c1(*v0_hat, params.m);
        report.D = std::sqrt(*report.C1 * (1.0 + std::pow(2.0, params.m)));
        report.bound_hm = error_bound_hm(params.epsilon, params.m, *report.C1);
    }
    return Reconstruction{std::move(v_eps), report, region, std::move(spectrum)};
}

double kappa_residual(const ComplexField& f_hat, const ComplexField& v0_hat, const SpectralWindow& window,
                      double kappa)
{
    if (!(f_hat.grid() == v0_hat.grid())) {
        throw GridMismatch("spectra live on different grids");
    }
    require_coverage(f_hat.grid(), window);
    const auto& g = f_hat.grid();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t l = 0; l < g.nt; ++l) {
        for (std::size_t k = 0; k < g.nx; ++k) {
            if (!window.contains(g.x(k), g.t(l))) {
                continue;
            }
            const auto fh = f_hat.at(k, l);
            num += std::norm(fh - kappa * s_hat(g.x(k), g.t(l)) * v0_hat.at(k, l));
            den += std::norm(fh);
        }
    }
    if (!(den > 0.0)) {
        throw NumericError("right-hand side spectrum vanishes on the window");
    }
    return std::sqrt(num / den);
}

KappaCalibration calibrate_kappa(const RealField& f, const RealField& g, const RealField& v0,
                                 const SpectralWindow& window, std::size_t spectral_nodes, double coverage)
{
    if (!(v0.grid() == f.grid())) {
        throw GridMismatch("v0 must share the data grid");
    }
    const auto spectral = spectral_grid_for(window, spectral_nodes, coverage);
    const auto f_hat = dft2_forward(assemble_rhs(f, g), spectral);
    const auto v_hat = dft2_forward(v0, spectral);
    return KappaCalibration{kappa_residual(f_hat, v_hat, window, 1.0),
                            kappa_residual(f_hat, v_hat, window, kKappa)};
}

} // namespace sidecast
