#include "sidecast/sinc.hpp"

#include "sidecast/errors.hpp"
#include "sidecast/parallel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace sidecast {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi u) with the argument reduced to [-1/2, 1/2] so integer u gives exact 0.
double sin_pi(double u)
{
    const double n = std::round(u);
    const double f = u - n;
    const double s = std::sin(kPi * f);
    return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

std::vector<double> cardinal_row(long N, double d, double z)
{
    std::vector<double> row(static_cast<std::size_t>(2 * N + 1));
    for (long p = -N; p <= N; ++p) {
        row[static_cast<std::size_t>(p + N)] = cardinal(p, d, z);
    }
    return row;
}

void require_mesh(double d)
{
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw ParameterError("sinc mesh d must be positive (got " + format_number(d) + ")");
    }
}

void require_order(long N)
{
    if (N < 1) {
        throw ParameterError("truncation N must be >= 1 (got " + std::to_string(N) + ")");
    }
}

} // namespace

double cardinal(long p, double d, double z)
{
    require_mesh(d);
    const double u = (z - static_cast<double>(p) * d) / d;
    if (u == 0.0) {
        return 1.0;
    }
    return sin_pi(u) / (kPi * u);
}

IndexKind parse_index_kind(std::string_view name)
{
    if (name == "square") {
        return IndexKind::Square;
    }
    if (name == "triangular") {
        return IndexKind::Triangular;
    }
    throw ParameterError("unknown index set '" + std::string(name) + "' (expected square or triangular)");
}

std::string_view to_string(IndexKind kind)
{
    return kind == IndexKind::Square ? "square" : "triangular";
}

bool IndexSet::contains(long m, long n) const noexcept
{
    if (std::abs(m) > N || std::abs(n) > N) {
        return false;
    }
    return kind == IndexKind::Square || std::abs(m) <= std::abs(n);
}

std::size_t IndexSet::size() const noexcept
{
    const auto n = static_cast<std::size_t>(N);
    return kind == IndexKind::Square ? (2 * n + 1) * (2 * n + 1) : 2 * n * n + 4 * n + 1;
}

SincMesh sinc_mesh(const RegParams& params)
{
    params.validate();
    double a = 0.0;
    if (params.mode == RegMode::HM) {
        a = cutoff_hm(params.epsilon, params.m);
    } else {
        const double b = cutoff_l2(params.epsilon, params.gamma);
        a = std::max(b, b * b);
    }
    return SincMesh{a, kPi / a};
}

SincExpansion::SincExpansion(double d, IndexSet set, std::vector<double> coeffs)
    : d_(d), set_(set), coeffs_(std::move(coeffs))
{
    require_mesh(d_);
    require_order(set_.N);
    const auto side = static_cast<std::size_t>(2 * set_.N + 1);
    if (coeffs_.size() != side * side) {
        throw GridMismatch("expansion needs " + std::to_string(side * side) + " lattice coefficients, got "
                           + std::to_string(coeffs_.size()));
    }
    for (long n = -set_.N; n <= set_.N; ++n) {
        for (long m = -set_.N; m <= set_.N; ++m) {
            auto& c = coeffs_[static_cast<std::size_t>(n + set_.N) * side + static_cast<std::size_t>(m + set_.N)];
            if (!set_.contains(m, n)) {
                c = 0.0;
            } else if (!std::isfinite(c)) {
                throw NumericError("non-finite coefficient at (" + std::to_string(m) + ", " + std::to_string(n) + ")");
            }
        }
    }
}

double SincExpansion::coeff(long m, long n) const
{
    if (!set_.contains(m, n)) {
        return 0.0;
    }
    const auto side = static_cast<std::size_t>(2 * set_.N + 1);
    return coeffs_[static_cast<std::size_t>(n + set_.N) * side + static_cast<std::size_t>(m + set_.N)];
}

double SincExpansion::operator()(double x, double t) const
{
    const long N = set_.N;
    const auto side = static_cast<std::size_t>(2 * N + 1);
    const auto cx = cardinal_row(N, d_, x);
    const auto ct = cardinal_row(N, d_, t);
    double acc = 0.0;
    for (std::size_t n = 0; n < side; ++n) {
        if (ct[n] == 0.0) {
            continue;
        }
        const double* row = coeffs_.data() + n * side;
        double inner = 0.0;
        for (std::size_t m = 0; m < side; ++m) {
            inner += row[m] * cx[m];
        }
        acc += ct[n] * inner;
    }
    return acc;
}

GridSpec sinc_lattice(long N, double d)
{
    require_order(N);
    require_mesh(d);
    const double lo = -static_cast<double>(N) * d;
    const auto side = static_cast<std::size_t>(2 * N + 1);
    return GridSpec{lo, d, side, lo, d, side};
}

SincExpansion build_expansion(const Evaluator& v_eps, double a_eps, long N, IndexKind kind)
{
    if (!(a_eps > 0.0) || !std::isfinite(a_eps)) {
        throw ParameterError("a_eps must be positive (got " + format_number(a_eps) + ")");
    }
    require_order(N);
    const double d = kPi / a_eps;
    const IndexSet set{kind, N};
    const auto side = static_cast<std::size_t>(2 * N + 1);
    std::vector<double> coeffs(side * side, 0.0);
    for (long n = -N; n <= N; ++n) {
        for (long m = -N; m <= N; ++m) {
            if (!set.contains(m, n)) {
                continue;
            }
            const double v = v_eps(static_cast<double>(m) * d, static_cast<double>(n) * d);
            if (!std::isfinite(v)) {
                throw NumericError("v_eps is non-finite at node (" + std::to_string(m) + ", " + std::to_string(n) + ")");
            }
            coeffs[static_cast<std::size_t>(n + N) * side + static_cast<std::size_t>(m + N)] = v;
        }
    }
    return SincExpansion(d, set, std::move(coeffs));
}

SincExpansion build_expansion(const RealField& lattice, IndexKind kind)
{
    const auto& g = lattice.grid();
    if (g.nx != g.nt || g.nx % 2 == 0 || std::abs(g.dx - g.dt) > 1e-12 * g.dx) {
        throw GridMismatch("lattice must be square with an odd node count and equal steps");
    }
    const long N = static_cast<long>(g.nx / 2);
    const double d = g.dx;
    if (std::abs(g.x0 + static_cast<double>(N) * d) > 1e-9 * d || std::abs(g.t0 + static_cast<double>(N) * d) > 1e-9 * d) {
        throw GridMismatch("lattice must be centred on the origin");
    }
    std::vector<double> coeffs(lattice.values().begin(), lattice.values().end());
    return SincExpansion(d, IndexSet{kind, N}, std::move(coeffs));
}

double eval_expansion(const SincExpansion& expansion, double x, double t)
{
    return expansion(x, t);
}

RealField eval_expansion(const SincExpansion& expansion, const GridSpec& grid)
{
    grid.validate();
    std::vector<double> out(grid.size());
    parallel_for(grid.nt, [&](std::size_t j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            out[j * grid.nx + i] = expansion(grid.x(i), grid.t(j));
        }
    });
    return RealField(grid, std::move(out));
}

double dropped_index_energy(const SincExpansion& full, IndexKind kept)
{
    const IndexSet keep{kept, full.index_set().N};
    const long N = full.index_set().N;
    double acc = 0.0;
    for (long n = -N; n <= N; ++n) {
        for (long m = -N; m <= N; ++m) {
            if (!keep.contains(m, n)) {
                const double c = full.coeff(m, n);
                acc += c * c;
            }
        }
    }
    return full.d() * full.d() * acc;
}

void write_expansion(const SincExpansion& expansion, const std::filesystem::path& path)
{
    if (path.empty()) {
        throw IoError("empty output path");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    const auto& set = expansion.index_set();
    out << format_number(expansion.d()) << ' ' << set.N << ' ' << to_string(set.kind) << '\n';
    for (long n = -set.N; n <= set.N; ++n) {
        for (long m = -set.N; m <= set.N; ++m) {
            if (set.contains(m, n)) {
                out << m << ' ' << n << ' ' << format_number(expansion.coeff(m, n)) << '\n';
            }
        }
    }
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

SincExpansion read_expansion(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    const std::string name = path.string();
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '#') {
                return true;
            }
        }
        return false;
    };
    if (!next_line()) {
        throw ParseError(name, lineno, "missing header 'd N kind'");
    }
    double d = 0.0;
    long N = 0;
    std::string kind_name;
    {
        std::istringstream hdr(line);
        std::string extra;
        if (!(hdr >> d >> N >> kind_name) || (hdr >> extra)) {
            throw ParseError(name, lineno, "header must be 'd N kind'");
        }
    }
    IndexSet set;
    try {
        require_mesh(d);
        require_order(N);
        set = IndexSet{parse_index_kind(kind_name), N};
    } catch (const ParameterError& e) {
        throw ParseError(name, lineno, e.what());
    }
    const auto side = static_cast<std::size_t>(2 * N + 1);
    std::vector<double> coeffs(side * side, 0.0);
    std::vector<char> seen(side * side, 0);
    std::size_t count = 0;
    while (next_line()) {
        std::istringstream row(line);
        long m = 0;
        long n = 0;
        std::string tok;
        std::string extra;
        if (!(row >> m >> n >> tok) || (row >> extra)) {
            throw ParseError(name, lineno, "row must be 'm n value'");
        }
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
            throw ParseError(name, lineno, "bad coefficient '" + tok + "'");
        }
        if (!set.contains(m, n)) {
            throw ParseError(name, lineno, "index (" + std::to_string(m) + ", " + std::to_string(n) + ") outside the set");
        }
        const auto k = static_cast<std::size_t>(n + N) * side + static_cast<std::size_t>(m + N);
        if (seen[k]) {
            throw ParseError(name, lineno, "duplicate index");
        }
        seen[k] = 1;
        coeffs[k] = v;
        ++count;
    }
    if (count != set.size()) {
        throw ParseError(name, lineno,
                         "expected " + std::to_string(set.size()) + " coefficients, found " + std::to_string(count));
    }
    return SincExpansion(d, set, std::move(coeffs));
}

} // namespace sidecast
