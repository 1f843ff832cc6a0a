#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sidecast {

using Evaluator = std::function<double(double x, double t)>;

/// Member of the causal kernel family K_c(x,t) = t^-2 exp(-(x^2 + c) / 4t), t > 0.
///
/// c is the squared vertical offset between the two lines the kernel couples:
/// c = 1 gives S (surface to the y = 1 line), c = 4 gives R (y = 1 to y = 2 line
/// through its image). c must be positive, otherwise the kernel is not integrable
/// near t = 0 on x = 0.
class KernelSpec {
public:
    explicit KernelSpec(double c);

    static KernelSpec S() { return KernelSpec(1.0); }
    static KernelSpec R() { return KernelSpec(4.0); }

    double c() const noexcept { return c_; }

    bool operator==(const KernelSpec&) const = default;

private:
    double c_;
};

/// Heat kernel of the plane, 1/(4 pi (t - tau)) exp(-((x-xi)^2 + (y-eta)^2) / 4(t - tau)).
/// Throws DomainError unless t > tau.
double gamma_fundamental(double x, double y, double t, double xi, double eta, double tau);

/// Green function of the half plane y < 2 with Dirichlet data on y = 2.
double green_G(double x, double y, double t, double xi, double eta, double tau);

/// Odd image of the heat kernel across y = 0.
double image_N(double x, double y, double t, double xi, double eta, double tau);

/// K_c(x, t); zero for t <= 0 (the t -> 0+ limit is taken as the value at 0).
double kernel_eval(const KernelSpec& spec, double x, double t);

/// Fourier symbol of S under the symmetric convention
/// (1/2pi) * integral S(x,t) exp(-i(xz + tr)) dx dt, in closed form.
std::complex<double> s_hat(double z, double r);

/// |s_hat(z, r)| = 2 exp(-sqrt((sqrt(z^4 + r^2) + z^2) / 2)).
double s_hat_abs(double z, double r);

/// Rectangle-rule settings for integrals of K_c against exp(-i(xz + tr)).
///
/// The x axis is sheared with the diffusion length, x = sqrt(t) * xi, so a
/// fixed xi range captures the Gaussian factor at every t. t runs over
/// (0, t_max] with step dt. The far-time mass at (z, r) = (0, 0) decays like
/// t^-3/2 and is added by a rectangle rule in sigma = t^-1/2 on (0, t_max^-1/2).
struct KernelQuadrature {
    double xi_max = 12.0;
    double dxi = 0.02;
    double t_max = 400.0;
    double dt = 0.01;
    double dsigma = 1.0e-4;
};

struct SpectralPoint {
    double z;
    double r;
};

/// integral K_c(x,t) exp(-i(xz + tr)) dx dt for each point, by rectangle rule
/// (no 1/2pi factor). Points sharing |z| share the inner x sums.
std::vector<std::complex<double>> kernel_fourier_quadrature(const KernelSpec& spec,
                                                            std::span<const SpectralPoint> points,
                                                            const KernelQuadrature& quad = {});

/// ||K_c||_L1(R^2) by quadrature; cached per c. Analytic value is 4 pi / sqrt(c).
/// Throws DomainError for c <= 0.
double kernel_l1_norm(const KernelSpec& spec);
double kernel_l1_norm(double c);

/// (1/t) exp(-(x^2 + c) / 4t) for t > 0, zero otherwise. Temperature at depth
/// sqrt(c) below a unit point source fired at the origin at t = 0.
double heat_profile(double c, double x, double t);

enum class ProblemId { P1, P2 };

ProblemId parse_problem_id(std::string_view name);
std::string_view to_string(ProblemId id);

/// Exact data on the lines y = 1 (f0) and y = 2 (g0) together with the surface
/// temperature v_exact they determine.
struct TestProblem {
    ProblemId id;
    Evaluator f0;
    Evaluator g0;
    Evaluator v_exact;
    /// Real-valued transform of the right-hand side as tabulated for P1:
    /// 4 exp(-sqrt(r^2 + z^4)) / sqrt(r^2 + z^4). Kept for reporting only; it
    /// does not match the quadrature of the assembled right-hand side.
    std::optional<std::function<double(double z, double r)>> f_hat_closed;
};

TestProblem test_problem(ProblemId id);

} // namespace sidecast
