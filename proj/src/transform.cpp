#include "sidecast/transform.hpp"

#include "sidecast/errors.hpp"
#include "sidecast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sidecast {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

using cplx = std::complex<double>;

// table[k * n + i] = exp(sign * i * a_k * b_i)
std::vector<cplx> phase_table(const std::vector<double>& a, const std::vector<double>& b, double sign)
{
    std::vector<cplx> table(a.size() * b.size());
    parallel_for(a.size(), [&](std::size_t k) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            table[k * b.size() + i] = std::polar(1.0, sign * a[k] * b[i]);
        }
    });
    return table;
}

std::vector<double> axis_x(const GridSpec& g)
{
    std::vector<double> v(g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) {
        v[i] = g.x(i);
    }
    return v;
}

std::vector<double> axis_t(const GridSpec& g)
{
    std::vector<double> v(g.nt);
    for (std::size_t j = 0; j < g.nt; ++j) {
        v[j] = g.t(j);
    }
    return v;
}

double imag_ratio(double max_re, double max_im)
{
    if (max_im == 0.0) {
        return 0.0;
    }
    return max_re > 0.0 ? max_im / max_re : INFINITY;
}

void check_residue(double max_re, double max_im)
{
    const double ratio = imag_ratio(max_re, max_im);
    if (ratio > WindowedSpectrum::kImagTolerance) {
        throw NumericError("inverse transform left an imaginary residue of " + format_number(ratio)
                           + " (max|Im|/max|Re|); spectrum is not conjugate-symmetric");
    }
}

} // namespace

SpectralWindow SpectralWindow::rect(double zmax, double rmax)
{
    SpectralWindow w{WindowShape::RectLR, zmax, rmax};
    w.validate();
    return w;
}

SpectralWindow SpectralWindow::square(double a)
{
    SpectralWindow w{WindowShape::Square, a, a};
    w.validate();
    return w;
}

void SpectralWindow::validate() const
{
    if (!(zmax > 0.0) || !(rmax > 0.0) || !std::isfinite(zmax) || !std::isfinite(rmax)) {
        throw ParameterError("spectral window half-widths must be positive (zmax = " + format_number(zmax)
                             + ", rmax = " + format_number(rmax) + ")");
    }
    if (shape == WindowShape::Square && zmax != rmax) {
        throw ParameterError("square window needs zmax == rmax");
    }
}

void require_coverage(const GridSpec& spectral, const SpectralWindow& window)
{
    spectral.validate();
    window.validate();
    const double tz = 1e-9 * spectral.dx;
    const double tr = 1e-9 * spectral.dt;
    if (spectral.x0 > -window.zmax + tz || spectral.x_last() < window.zmax - tz
        || spectral.t0 > -window.rmax + tr || spectral.t_last() < window.rmax - tr) {
        throw GridMismatch("spectral grid [" + format_number(spectral.x0) + ", " + format_number(spectral.x_last())
                           + "] x [" + format_number(spectral.t0) + ", " + format_number(spectral.t_last())
                           + "] does not cover the window |z| <= " + format_number(window.zmax)
                           + ", |r| <= " + format_number(window.rmax));
    }
}

GridSpec spectral_grid_for(const SpectralWindow& window, std::size_t nodes, double coverage)
{
    window.validate();
    if (nodes < 2) {
        throw ParameterError("spectral grid needs at least 2 nodes per axis");
    }
    if (!(coverage >= 1.0)) {
        throw ParameterError("spectral coverage must be >= 1 (got " + format_number(coverage) + ")");
    }
    const double zspan = coverage * window.zmax;
    const double rspan = coverage * window.rmax;
    return grid_over(-zspan, zspan, nodes, -rspan, rspan, nodes);
}

ComplexField dft2_forward(const RealField& field, const GridSpec& spectral)
{
    spectral.validate();
    const auto& g = field.grid();
    const auto xs = axis_x(g);
    const auto ts = axis_t(g);
    const auto zs = axis_x(spectral);
    const auto rs = axis_t(spectral);
    const std::size_t nz = zs.size();
    const auto ex = phase_table(zs, xs, -1.0); // [k][i]
    const auto et = phase_table(rs, ts, -1.0); // [l][j]

    // partial[j][k] = sum_i f[i,j] exp(-i x_i z_k)
    std::vector<cplx> partial(g.nt * nz);
    const auto values = field.values();
    parallel_for(g.nt, [&](std::size_t j) {
        const double* row = values.data() + j * g.nx;
        for (std::size_t k = 0; k < nz; ++k) {
            const cplx* e = ex.data() + k * g.nx;
            double re = 0.0;
            double im = 0.0;
            for (std::size_t i = 0; i < g.nx; ++i) {
                re += row[i] * e[i].real();
                im += row[i] * e[i].imag();
            }
            partial[j * nz + k] = {re, im};
        }
    });

    const double scale = g.cell_area() * kInvTwoPi;
    std::vector<cplx> out(spectral.size());
    parallel_for(rs.size(), [&](std::size_t l) {
        const cplx* e = et.data() + l * g.nt;
        cplx* dst = out.data() + l * nz;
        for (std::size_t j = 0; j < g.nt; ++j) {
            const cplx w = e[j];
            const cplx* src = partial.data() + j * nz;
            for (std::size_t k = 0; k < nz; ++k) {
                dst[k] += w * src[k];
            }
        }
        for (std::size_t k = 0; k < nz; ++k) {
            dst[k] *= scale;
        }
    });
    return ComplexField(spectral, std::move(out));
}

ComplexField dft2_forward_direct(const RealField& field, const GridSpec& spectral)
{
    spectral.validate();
    const auto& g = field.grid();
    const double scale = g.cell_area() * kInvTwoPi;
    std::vector<cplx> out(spectral.size());
    parallel_for(spectral.nt, [&](std::size_t l) {
        const double r = spectral.t(l);
        for (std::size_t k = 0; k < spectral.nx; ++k) {
            const double z = spectral.x(k);
            cplx acc = 0.0;
            for (std::size_t j = 0; j < g.nt; ++j) {
                for (std::size_t i = 0; i < g.nx; ++i) {
                    acc += field.at(i, j) * std::polar(1.0, -(g.x(i) * z + g.t(j) * r));
                }
            }
            out[l * spectral.nx + k] = acc * scale;
        }
    });
    return ComplexField(spectral, std::move(out));
}

WindowedSpectrum::WindowedSpectrum(const ComplexField& spectrum, const SpectralWindow& window) : window_(window)
{
    const auto& g = spectrum.grid();
    require_coverage(g, window);
    cell_ = g.cell_area() * kInvTwoPi;
    std::vector<std::size_t> cols;
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < g.nx; ++k) {
        if (std::abs(g.x(k)) <= window.zmax) {
            cols.push_back(k);
            z_.push_back(g.x(k));
        }
    }
    for (std::size_t l = 0; l < g.nt; ++l) {
        if (std::abs(g.t(l)) <= window.rmax) {
            rows.push_back(l);
            r_.push_back(g.t(l));
        }
    }
    if (cols.empty() || rows.empty()) {
        z_.clear();
        r_.clear();
        return;
    }
    values_.reserve(cols.size() * rows.size());
    for (std::size_t l : rows) {
        for (std::size_t k : cols) {
            values_.push_back(spectrum.at(k, l));
        }
    }
}

std::complex<double> WindowedSpectrum::evaluate(double x, double t) const
{
    const std::size_t nz = z_.size();
    cplx acc = 0.0;
    for (std::size_t l = 0; l < r_.size(); ++l) {
        cplx row = 0.0;
        for (std::size_t k = 0; k < nz; ++k) {
            row += values_[l * nz + k] * std::polar(1.0, x * z_[k]);
        }
        acc += row * std::polar(1.0, t * r_[l]);
    }
    return acc * cell_;
}

RealField WindowedSpectrum::on_grid(const GridSpec& phys) const
{
    phys.validate();
    if (values_.empty()) {
        return RealField::zeros(phys);
    }
    const std::size_t nz = z_.size();
    const std::size_t nr = r_.size();
    const auto xs = axis_x(phys);
    const auto ts = axis_t(phys);
    const auto ex = phase_table(xs, z_, 1.0); // [i][k]
    const auto et = phase_table(ts, r_, 1.0); // [j][l]

    // partial[l][i] = sum_k v[l,k] exp(i x_i z_k)
    std::vector<cplx> partial(nr * phys.nx);
    parallel_for(nr, [&](std::size_t l) {
        const cplx* v = values_.data() + l * nz;
        for (std::size_t i = 0; i < phys.nx; ++i) {
            const cplx* e = ex.data() + i * nz;
            cplx acc = 0.0;
            for (std::size_t k = 0; k < nz; ++k) {
                acc += v[k] * e[k];
            }
            partial[l * phys.nx + i] = acc;
        }
    });

    std::vector<cplx> full(phys.size());
    parallel_for(phys.nt, [&](std::size_t j) {
        const cplx* e = et.data() + j * nr;
        cplx* dst = full.data() + j * phys.nx;
        for (std::size_t l = 0; l < nr; ++l) {
            const cplx w = e[l];
            const cplx* src = partial.data() + l * phys.nx;
            for (std::size_t i = 0; i < phys.nx; ++i) {
                dst[i] += w * src[i];
            }
        }
    });

    double max_re = 0.0;
    double max_im = 0.0;
    std::vector<double> out(phys.size());
    for (std::size_t n = 0; n < full.size(); ++n) {
        const cplx v = full[n] * cell_;
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
        out[n] = v.real();
    }
    check_residue(max_re, max_im);
    return RealField(phys, std::move(out));
}

std::vector<double> WindowedSpectrum::at_points(std::span<const double> xs, std::span<const double> ts) const
{
    if (xs.size() != ts.size()) {
        throw ParameterError("point lists differ in length");
    }
    std::vector<cplx> vals(xs.size());
    parallel_for(xs.size(), [&](std::size_t p) { vals[p] = evaluate(xs[p], ts[p]); });
    double max_re = 0.0;
    double max_im = 0.0;
    std::vector<double> out(xs.size());
    for (std::size_t p = 0; p < vals.size(); ++p) {
        max_re = std::max(max_re, std::abs(vals[p].real()));
        max_im = std::max(max_im, std::abs(vals[p].imag()));
        out[p] = vals[p].real();
    }
    check_residue(max_re, max_im);
    return out;
}

RealField idft2_windowed(const ComplexField& spectrum, const SpectralWindow& window, const GridSpec& phys)
{
    return WindowedSpectrum(spectrum, window).on_grid(phys);
}

} // namespace sidecast
