#pragma once

#include "sidecast/fields.hpp"
#include "sidecast/kernels.hpp"
#include "sidecast/regularizer.hpp"

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

namespace sidecast {

/// sin(pi (z - p d) / d) / (pi (z - p d) / d), 1 at z = p d. Throws ParameterError for d <= 0.
double cardinal(long p, double d, double z);

enum class IndexKind { Square, Triangular };

IndexKind parse_index_kind(std::string_view name);
std::string_view to_string(IndexKind kind);

/// SQUARE(N): |m|, |n| <= N. TRIANGULAR(N): |n| <= N, |m| <= |n|.
struct IndexSet {
    IndexKind kind = IndexKind::Square;
    long N = 50;

    bool contains(long m, long n) const noexcept;
    /// (2N+1)^2 or 2N^2 + 4N + 1.
    std::size_t size() const noexcept;
};

struct SincMesh {
    double a;
    double d;
};

/// HM: a = a_eps. L2: a = max(b_eps, b_eps^2). d = pi / a.
SincMesh sinc_mesh(const RegParams& params);

/// Truncated 2D cardinal series sum c(m,n) S(m,d)(x) S(n,d)(t).
class SincExpansion {
public:
    /// coeffs is the full (2N+1)^2 lattice, row-major in n then m; entries
    /// outside the index set are ignored.
    SincExpansion(double d, IndexSet set, std::vector<double> coeffs);

    double d() const noexcept { return d_; }
    const IndexSet& index_set() const noexcept { return set_; }

    /// Coefficient at (m, n); 0 outside the index set.
    double coeff(long m, long n) const;

    double operator()(double x, double t) const;

private:
    double d_;
    IndexSet set_;
    std::vector<double> coeffs_;
};

/// Samples v_eps at (m pi/a, n pi/a) over the index set.
SincExpansion build_expansion(const Evaluator& v_eps, double a_eps, long N, IndexKind kind);

/// Same, from samples already on the lattice grid x0 = t0 = -N d, dx = dt = d.
SincExpansion build_expansion(const RealField& lattice, IndexKind kind);

/// Lattice grid for (N, d).
GridSpec sinc_lattice(long N, double d);

double eval_expansion(const SincExpansion& expansion, double x, double t);

/// Expansion on every node of grid.
RealField eval_expansion(const SincExpansion& expansion, const GridSpec& grid);

/// d^2 times the sum of squared coefficients of full that kept drops.
double dropped_index_energy(const SincExpansion& full, IndexKind kept);

/// Text format: "d N kind" then one "m n value" row per index in the set.
void write_expansion(const SincExpansion& expansion, const std::filesystem::path& path);
SincExpansion read_expansion(const std::filesystem::path& path);

} // namespace sidecast
