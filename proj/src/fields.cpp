#include "sidecast/fields.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sidecast {

namespace {

void require_same_grid(const RealField& a, const RealField& b)
{
    if (!(a.grid() == b.grid())) {
        throw GridMismatch("fields live on different grids");
    }
}

template <class Op>
RealField zip(const RealField& a, const RealField& b, Op op)
{
    require_same_grid(a, b);
    std::vector<double> out(a.values().size());
    std::transform(a.values().begin(), a.values().end(), b.values().begin(), out.begin(), op);
    return RealField(a.grid(), std::move(out));
}

bool blank_or_comment(const std::string& line)
{
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

std::vector<std::string> split_ws(const std::string& line)
{
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

double parse_double(const std::string& tok, const std::string& path, std::size_t line)
{
    double v = 0.0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(path, line, "not a number: '" + tok + "'");
    }
    if (!std::isfinite(v)) {
        throw ParseError(path, line, "non-finite value: '" + tok + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& tok, const std::string& path, std::size_t line)
{
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError(path, line, "not a node count: '" + tok + "'");
    }
    return v;
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
    if (path.empty()) {
        throw IoError("empty output path");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

} // namespace

void GridSpec::validate() const
{
    if (!(dx > 0.0) || !(dt > 0.0) || !std::isfinite(dx) || !std::isfinite(dt)) {
        throw GridMismatch("grid steps must be positive (dx = " + format_number(dx) + ", dt = "
                           + format_number(dt) + ")");
    }
    if (nx < 2 || nt < 2) {
        throw GridMismatch("grid needs at least 2 nodes per axis (nx = " + std::to_string(nx)
                           + ", nt = " + std::to_string(nt) + ")");
    }
    if (!std::isfinite(x0) || !std::isfinite(t0)) {
        throw GridMismatch("grid origin must be finite");
    }
}

GridSpec grid_over(double x_lo, double x_hi, std::size_t nx, double t_lo, double t_hi, std::size_t nt)
{
    if (nx < 2 || nt < 2) {
        throw GridMismatch("grid needs at least 2 nodes per axis");
    }
    GridSpec g{x_lo, (x_hi - x_lo) / static_cast<double>(nx - 1), nx,
               t_lo, (t_hi - t_lo) / static_cast<double>(nt - 1), nt};
    g.validate();
    return g;
}

RealField sample(const Evaluator& fn, const GridSpec& grid)
{
    grid.validate();
    std::vector<double> values(grid.size());
    for (std::size_t j = 0; j < grid.nt; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double v = fn(grid.x(i), grid.t(j));
            if (!std::isfinite(v)) {
                throw NumericError("evaluator returned a non-finite value at node (" + std::to_string(i) + ", "
                                   + std::to_string(j) + ") = (" + format_number(grid.x(i)) + ", "
                                   + format_number(grid.t(j)) + ")");
            }
            values[j * grid.nx + i] = v;
        }
    }
    return RealField(grid, std::move(values));
}

double l2_norm(const RealField& field)
{
    double acc = 0.0;
    for (double v : field.values()) {
        acc += v * v;
    }
    return std::sqrt(acc * field.grid().cell_area());
}

double l2_norm(const ComplexField& field)
{
    double acc = 0.0;
    for (const auto& v : field.values()) {
        acc += std::norm(v);
    }
    return std::sqrt(acc * field.grid().cell_area());
}

double l2_distance(const RealField& a, const RealField& b)
{
    require_same_grid(a, b);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        const double d = a.values()[k] - b.values()[k];
        acc += d * d;
    }
    return std::sqrt(acc * a.grid().cell_area());
}

RealField operator+(const RealField& a, const RealField& b)
{
    return zip(a, b, std::plus<>());
}

RealField operator-(const RealField& a, const RealField& b)
{
    return zip(a, b, std::minus<>());
}

RealField operator*(double alpha, const RealField& a)
{
    std::vector<double> out(a.values().begin(), a.values().end());
    for (double& v : out) {
        v *= alpha;
    }
    return RealField(a.grid(), std::move(out));
}

RealField crop(const RealField& field, const Rect& window)
{
    const auto& g = field.grid();
    const double tol_x = 1e-9 * g.dx;
    const double tol_t = 1e-9 * g.dt;
    std::size_t i_lo = g.nx, i_hi = 0, j_lo = g.nt, j_hi = 0;
    for (std::size_t i = 0; i < g.nx; ++i) {
        if (g.x(i) >= window.x_lo - tol_x && g.x(i) <= window.x_hi + tol_x) {
            i_lo = std::min(i_lo, i);
            i_hi = std::max(i_hi, i);
        }
    }
    for (std::size_t j = 0; j < g.nt; ++j) {
        if (g.t(j) >= window.t_lo - tol_t && g.t(j) <= window.t_hi + tol_t) {
            j_lo = std::min(j_lo, j);
            j_hi = std::max(j_hi, j);
        }
    }
    if (i_lo > i_hi || j_lo > j_hi || i_hi - i_lo < 1 || j_hi - j_lo < 1) {
        throw GridMismatch("window holds fewer than 2x2 grid nodes");
    }
    GridSpec sub{g.x(i_lo), g.dx, i_hi - i_lo + 1, g.t(j_lo), g.dt, j_hi - j_lo + 1};
    std::vector<double> values;
    values.reserve(sub.size());
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        for (std::size_t i = i_lo; i <= i_hi; ++i) {
            values.push_back(field.at(i, j));
        }
    }
    return RealField(sub, std::move(values));
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_field(const RealField& field, const std::filesystem::path& path)
{
    auto out = open_for_write(path);
    const auto& g = field.grid();
    out << g.nx << ' ' << g.nt << ' ' << format_number(g.x0) << ' ' << format_number(g.dx) << ' '
        << format_number(g.t0) << ' ' << format_number(g.dt) << '\n';
    for (std::size_t j = 0; j < g.nt; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            if (i) {
                out << ' ';
            }
            out << format_number(field.at(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

RealField read_field(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    const std::string name = path.string();
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    GridSpec grid;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (!have_header) {
            if (blank_or_comment(line)) {
                continue;
            }
            const auto tok = split_ws(line);
            if (tok.size() != 6) {
                throw ParseError(name, lineno, "header must be 'nx nt x0 dx t0 dt'");
            }
            grid = GridSpec{parse_double(tok[2], name, lineno), parse_double(tok[3], name, lineno),
                            parse_count(tok[0], name, lineno), parse_double(tok[4], name, lineno),
                            parse_double(tok[5], name, lineno), parse_count(tok[1], name, lineno)};
            try {
                grid.validate();
            } catch (const GridMismatch& e) {
                throw ParseError(name, lineno, e.what());
            }
            values.reserve(grid.size());
            have_header = true;
            continue;
        }
        for (const auto& tok : split_ws(line)) {
            if (values.size() == grid.size()) {
                throw ParseError(name, lineno, "more than " + std::to_string(grid.size()) + " values");
            }
            values.push_back(parse_double(tok, name, lineno));
        }
    }
    if (!have_header) {
        throw ParseError(name, lineno, "missing header");
    }
    if (values.size() != grid.size()) {
        throw ParseError(name, lineno,
                         "expected " + std::to_string(grid.size()) + " values, found " + std::to_string(values.size()));
    }
    return RealField(grid, std::move(values));
}

void write_csv(const RealField& field, const std::filesystem::path& path)
{
    auto out = open_for_write(path);
    const auto& g = field.grid();
    out << "x,t,value\n";
    for (std::size_t j = 0; j < g.nt; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            out << format_number(g.x(i)) << ',' << format_number(g.t(j)) << ',' << format_number(field.at(i, j))
                << '\n';
        }
    }
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

} // namespace sidecast
