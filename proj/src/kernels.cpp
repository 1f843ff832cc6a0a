#include "sidecast/kernels.hpp"

#include "sidecast/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace sidecast {

namespace {

constexpr double kPi = std::numbers::pi;

void require_forward(double t, double tau)
{
    if (!(t > tau)) {
        throw DomainError("heat kernel requires t > tau (got t = " + std::to_string(t)
                          + ", tau = " + std::to_string(tau) + ")");
    }
}

// sum_xi exp(-xi^2/4) cos(sqrt(t) xi z) dxi on a grid symmetric about 0; the
// sine part cancels pairwise.
double sheared_x_sum(const std::vector<double>& xi, const std::vector<double>& weight, double scaled_z)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
        acc += weight[k] * std::cos(scaled_z * xi[k]);
    }
    return acc;
}

} // namespace

KernelSpec::KernelSpec(double c) : c_(c)
{
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError("kernel offset c must be positive and finite (got " + std::to_string(c) + ")");
    }
}

double gamma_fundamental(double x, double y, double t, double xi, double eta, double tau)
{
    require_forward(t, tau);
    const double s = t - tau;
    const double dx = x - xi;
    const double dy = y - eta;
    return std::exp(-(dx * dx + dy * dy) / (4.0 * s)) / (4.0 * kPi * s);
}

double green_G(double x, double y, double t, double xi, double eta, double tau)
{
    return gamma_fundamental(x, y, t, xi, eta, tau) - gamma_fundamental(x, 4.0 - y, t, xi, eta, tau);
}

double image_N(double x, double y, double t, double xi, double eta, double tau)
{
    return gamma_fundamental(x, y, t, xi, eta, tau) - gamma_fundamental(x, -y, t, xi, eta, tau);
}

double kernel_eval(const KernelSpec& spec, double x, double t)
{
    if (!(t > 0.0)) {
        return 0.0;
    }
    return std::exp(-(x * x + spec.c()) / (4.0 * t)) / (t * t);
}

std::complex<double> s_hat(double z, double r)
{
    const double modulus = std::sqrt(z * z * z * z + r * r);
    const double decay = std::sqrt((modulus + z * z) / 2.0);
    const double phase = std::sqrt(std::max(0.0, modulus - z * z) / 2.0);
    const double sign = (r > 0.0) ? 1.0 : ((r < 0.0) ? -1.0 : 0.0);
    const double amp = 2.0 * std::exp(-decay);
    return {amp * std::cos(phase), -sign * amp * std::sin(phase)};
}

double s_hat_abs(double z, double r)
{
    const double modulus = std::sqrt(z * z * z * z + r * r);
    return 2.0 * std::exp(-std::sqrt((modulus + z * z) / 2.0));
}

std::vector<std::complex<double>> kernel_fourier_quadrature(const KernelSpec& spec,
                                                            std::span<const SpectralPoint> points,
                                                            const KernelQuadrature& quad)
{
    const auto half = static_cast<long>(std::llround(quad.xi_max / quad.dxi));
    std::vector<double> xi;
    std::vector<double> weight;
    xi.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long k = -half; k <= half; ++k) {
        const double v = static_cast<double>(k) * quad.dxi;
        xi.push_back(v);
        weight.push_back(std::exp(-v * v / 4.0) * quad.dxi);
    }
    double gauss_mass = 0.0;
    for (double w : weight) {
        gauss_mass += w;
    }

    const auto nt = static_cast<std::size_t>(std::llround(quad.t_max / quad.dt));
    // t-dependent factor sqrt(t) * t^-2 * exp(-c/4t) * dt; dx = sqrt(t) dxi.
    std::vector<double> t_nodes(nt);
    std::vector<double> t_weight(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const double t = static_cast<double>(j + 1) * quad.dt;
        t_nodes[j] = t;
        t_weight[j] = std::sqrt(t) * std::exp(-spec.c() / (4.0 * t)) / (t * t) * quad.dt;
    }

    std::map<double, std::vector<double>> inner_by_z;
    auto inner_for = [&](double z) -> const std::vector<double>& {
        const double key = std::abs(z);
        auto it = inner_by_z.find(key);
        if (it != inner_by_z.end()) {
            return it->second;
        }
        std::vector<double> inner(nt);
        for (std::size_t j = 0; j < nt; ++j) {
            inner[j] = (key == 0.0) ? gauss_mass : sheared_x_sum(xi, weight, std::sqrt(t_nodes[j]) * key);
        }
        return inner_by_z.emplace(key, std::move(inner)).first->second;
    };

    std::vector<std::complex<double>> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        const auto& inner = inner_for(p.z);
        double re = 0.0;
        double im = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            const double a = t_weight[j] * inner[j];
            re += a * std::cos(t_nodes[j] * p.r);
            im -= a * std::sin(t_nodes[j] * p.r);
        }
        if (p.z == 0.0 && p.r == 0.0) {
            // integral_{t_max}^inf t^-3/2 exp(-c/4t) dt with t = sigma^-2
            const double sigma_max = 1.0 / std::sqrt(quad.t_max);
            const auto ns = static_cast<std::size_t>(std::llround(sigma_max / quad.dsigma));
            const double ds = sigma_max / static_cast<double>(ns);
            double tail = 0.0;
            for (std::size_t k = 0; k < ns; ++k) {
                const double s = (static_cast<double>(k) + 0.5) * ds;
                tail += 2.0 * std::exp(-spec.c() * s * s / 4.0) * ds;
            }
            re += gauss_mass * tail;
        }
        out.emplace_back(re, im);
    }
    return out;
}

double kernel_l1_norm(const KernelSpec& spec)
{
    static std::mutex mutex;
    static std::map<double, double> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(spec.c()); it != cache.end()) {
            return it->second;
        }
    }
    const SpectralPoint origin{0.0, 0.0};
    // K_c >= 0, so the L1 norm is its integral.
    const double norm = kernel_fourier_quadrature(spec, std::span(&origin, 1)).front().real();
    std::lock_guard lock(mutex);
    cache.emplace(spec.c(), norm);
    return norm;
}

double kernel_l1_norm(double c)
{
    return kernel_l1_norm(KernelSpec(c));
}

double heat_profile(double c, double x, double t)
{
    if (!(t > 0.0)) {
        return 0.0;
    }
    return std::exp(-(x * x + c) / (4.0 * t)) / t;
}

ProblemId parse_problem_id(std::string_view name)
{
    if (name == "p1" || name == "P1") {
        return ProblemId::P1;
    }
    if (name == "p2" || name == "P2") {
        return ProblemId::P2;
    }
    throw ParameterError("unknown test problem '" + std::string(name) + "' (expected p1 or p2)");
}

std::string_view to_string(ProblemId id)
{
    switch (id) {
    case ProblemId::P1:
        return "p1";
    case ProblemId::P2:
        return "p2";
    }
    throw ParameterError("unknown test problem id");
}

TestProblem test_problem(ProblemId id)
{
    switch (id) {
    case ProblemId::P1:
        return TestProblem{
            .id = id,
            .f0 = [](double x, double t) { return heat_profile(1.0, x, t); },
            .g0 = [](double x, double t) { return heat_profile(4.0, x, t); },
            .v_exact = [](double x, double t) { return heat_profile(0.0, x, t); },
            .f_hat_closed =
                [](double z, double r) {
                    const double rho = std::sqrt(r * r + z * z * z * z);
                    return 4.0 * std::exp(-rho) / rho;
                },
        };
    case ProblemId::P2:
        return TestProblem{
            .id = id,
            .f0 = [](double, double) { return 0.0; },
            .g0 = [](double x, double t) { return heat_profile(4.0, x, t); },
            .v_exact = [](double x, double t) { return -heat_profile(4.0, x, t); },
            .f_hat_closed = std::nullopt,
        };
    }
    throw ParameterError("unknown test problem id");
}

} // namespace sidecast
