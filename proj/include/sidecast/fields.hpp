#pragma once

#include "sidecast/errors.hpp"
#include "sidecast/kernels.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace sidecast {

/// Uniform grid over a rectangle. Node (i, j) sits at (x0 + i dx, t0 + j dt).
/// The same type describes spectral grids, with (x, t) read as (z, r).
struct GridSpec {
    double x0 = 0.0;
    double dx = 1.0;
    std::size_t nx = 2;
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t nt = 2;

    double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
    double t(std::size_t j) const noexcept { return t0 + static_cast<double>(j) * dt; }
    double x_last() const noexcept { return x(nx - 1); }
    double t_last() const noexcept { return t(nt - 1); }
    std::size_t size() const noexcept { return nx * nt; }
    double cell_area() const noexcept { return dx * dt; }

    /// Throws GridMismatch unless dx, dt > 0 and nx, nt >= 2.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Grid with n nodes per axis spanning [x_lo, x_hi] x [t_lo, t_hi] inclusive.
GridSpec grid_over(double x_lo, double x_hi, std::size_t nx, double t_lo, double t_hi, std::size_t nt);

/// Closed rectangle in (x, t).
struct Rect {
    double x_lo;
    double x_hi;
    double t_lo;
    double t_hi;

    bool contains(double x, double t, double tol = 0.0) const noexcept
    {
        return x >= x_lo - tol && x <= x_hi + tol && t >= t_lo - tol && t <= t_hi + tol;
    }
};

/// Samples on a GridSpec, row-major with row j holding fixed t_j.
/// Immutable once built; every entry is finite.
template <class T>
class Field {
public:
    Field(GridSpec grid, std::vector<T> values) : grid_(grid), values_(std::move(values))
    {
        grid_.validate();
        if (values_.size() != grid_.size()) {
            throw GridMismatch("field has " + std::to_string(values_.size()) + " values for a "
                               + std::to_string(grid_.nx) + "x" + std::to_string(grid_.nt) + " grid");
        }
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (!is_finite(values_[k])) {
                throw NumericError("non-finite value at node (" + std::to_string(k % grid_.nx) + ", "
                                   + std::to_string(k / grid_.nx) + ")");
            }
        }
    }

    static Field zeros(const GridSpec& grid) { return Field(grid, std::vector<T>(grid.size(), T{})); }

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<const T> values() const noexcept { return values_; }
    const T& at(std::size_t i, std::size_t j) const { return values_[j * grid_.nx + i]; }

private:
    static bool is_finite(double v) { return std::isfinite(v); }
    static bool is_finite(const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

    GridSpec grid_;
    std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<std::complex<double>>;

/// values[i, j] = fn(x_i, t_j). Throws NumericError naming the first
/// non-finite node.
RealField sample(const Evaluator& fn, const GridSpec& grid);

/// sqrt(dx dt sum |v|^2), the rectangle-rule L2 norm.
double l2_norm(const RealField& field);
double l2_norm(const ComplexField& field);

/// l2_norm(a - b); throws GridMismatch unless the grids are identical.
double l2_distance(const RealField& a, const RealField& b);

RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator*(double alpha, const RealField& a);

/// Sub-field of the nodes lying inside window (with a tolerance of 1e-9 cells).
/// Throws GridMismatch if no node qualifies.
RealField crop(const RealField& field, const Rect& window);

/// GRD text format: optional '#' comment lines, then "nx nt x0 dx t0 dt",
/// then nt lines of nx values (one line per t index), 17 significant digits.
void write_field(const RealField& field, const std::filesystem::path& path);
RealField read_field(const std::filesystem::path& path);

/// "x,t,value" header then one row per node in row-major order.
void write_csv(const RealField& field, const std::filesystem::path& path);

/// %.17g formatting used by every text output.
std::string format_number(double value);

} // namespace sidecast
