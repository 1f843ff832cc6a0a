#pragma once

#include "sidecast/fields.hpp"
#include "sidecast/kernels.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sidecast {

enum class WindowShape { RectLR, Square };

/// Closed frequency window |z| <= zmax, |r| <= rmax. SQUARE has zmax = rmax.
struct SpectralWindow {
    WindowShape shape = WindowShape::RectLR;
    double zmax = 1.0;
    double rmax = 1.0;

    static SpectralWindow rect(double zmax, double rmax);
    static SpectralWindow square(double a);

    bool contains(double z, double r) const noexcept { return std::abs(z) <= zmax && std::abs(r) <= rmax; }

    /// Throws ParameterError unless zmax, rmax > 0 (and equal for SQUARE).
    void validate() const;
};

/// Throws GridMismatch unless the window lies inside the grid's (z, r) span.
void require_coverage(const GridSpec& spectral, const SpectralWindow& window);

/// Symmetric n x n spectral grid over [-coverage zmax, coverage zmax] x
/// [-coverage rmax, coverage rmax].
GridSpec spectral_grid_for(const SpectralWindow& window, std::size_t nodes, double coverage);

/// (1/2pi) sum field[i,j] exp(-i(x_i z_k + t_j r_l)) dx dt.
/// Separable evaluation (x sums, then t sums), parallel over rows.
ComplexField dft2_forward(const RealField& field, const GridSpec& spectral);

/// Same sum evaluated term by term; reference for dft2_forward.
ComplexField dft2_forward_direct(const RealField& field, const GridSpec& spectral);

/// Spectral nodes inside a window, ready for the inverse sum
/// (1/2pi) sum v[k,l] exp(+i(x z_k + t r_l)) dz dr.
class WindowedSpectrum {
public:
    WindowedSpectrum(const ComplexField& spectrum, const SpectralWindow& window);

    const SpectralWindow& window() const noexcept { return window_; }
    std::size_t node_count() const noexcept { return values_.size(); }

    /// Complex inverse sum at one point.
    std::complex<double> evaluate(double x, double t) const;

    /// Real part on a grid. Throws NumericError if max|Im| / max|Re| > 1e-6.
    RealField on_grid(const GridSpec& phys) const;

    /// Real part at scattered points, same residue check over the batch.
    std::vector<double> at_points(std::span<const double> xs, std::span<const double> ts) const;

    /// Largest accepted max|Im| / max|Re|.
    static constexpr double kImagTolerance = 1.0e-6;

private:
    SpectralWindow window_;
    double cell_ = 0.0;
    // nodes inside the window: z_ holds the retained columns, r_ the retained
    // rows, values_ is row-major over (r_, z_)
    std::vector<double> z_;
    std::vector<double> r_;
    std::vector<std::complex<double>> values_;
};

/// WindowedSpectrum(spectrum, window).on_grid(phys).
RealField idft2_windowed(const ComplexField& spectrum, const SpectralWindow& window, const GridSpec& phys);

/// (K * w)(x, t) = integral K(x - xi, t - tau) w(xi, tau) by rectangle rule on w's
/// grid, with x lags dropped where exp(-dx^2 / 4s) < 1e-12.
///
/// When out_grid is w's grid or a node-aligned sub-grid the sum is a discrete
/// linear convolution and runs through FFTW; otherwise convolve2_causal_direct.
/// Throws GridMismatch if out_grid starts before w's t0, DomainError if w starts
/// before t = 0.
RealField convolve2_causal(const KernelSpec& spec, const RealField& w, const GridSpec& out_grid);

/// Direct O(N^2) evaluation of the same sum.
RealField convolve2_causal_direct(const KernelSpec& spec, const RealField& w, const GridSpec& out_grid);

/// Largest |dx| kept for time lag s: sqrt(4 s ln 1e12).
double gaussian_cutoff(double s);

} // namespace sidecast
