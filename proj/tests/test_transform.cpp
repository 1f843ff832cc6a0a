#include "oracles.hpp"

#include "sidecast/errors.hpp"
#include "sidecast/harness.hpp"
#include "sidecast/regularizer.hpp"
#include "sidecast/transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sidecast;

namespace {

RealField gaussian_on(const GridSpec& g)
{
    return sample([](double x, double t) { return std::exp(-x * x - t * t); }, g);
}

RealField random_field(const GridSpec& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(g.size());
    for (auto& x : v) {
        x = u(rng);
    }
    return RealField(g, std::move(v));
}

double max_abs_diff(const ComplexField& a, const ComplexField& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    }
    return m;
}

double max_abs(const ComplexField& a)
{
    double m = 0.0;
    for (const auto& v : a.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace

TEST(Window, Validation)
{
    EXPECT_THROW(SpectralWindow::rect(0.0, 1.0), ParameterError);
    EXPECT_THROW(SpectralWindow::square(-1.0), ParameterError);
    EXPECT_THROW((SpectralWindow{WindowShape::Square, 1.0, 2.0}.validate()), ParameterError);
    const auto w = SpectralWindow::rect(2.0, 4.0);
    EXPECT_TRUE(w.contains(-2.0, 4.0));
    EXPECT_FALSE(w.contains(2.0001, 0.0));
    const auto g = spectral_grid_for(w, 65, 1.25);
    EXPECT_NEAR(g.x0, -2.5, 1e-15);
    EXPECT_NEAR(g.t_last(), 5.0, 1e-14);
    EXPECT_THROW(require_coverage(g, SpectralWindow::rect(2.6, 4.0)), GridMismatch);
}

TEST(Dft2, GaussianOracle)
{
    const double h = 0.05;
    const GridSpec g{-8, h, 321, -8, h, 321};
    const auto spec_grid = grid_over(-3, 3, 7, -3, 3, 7);
    const auto ft = dft2_forward(gaussian_on(g), spec_grid);
    for (std::size_t l = 0; l < spec_grid.nt; ++l) {
        for (std::size_t k = 0; k < spec_grid.nx; ++k) {
            const double expected = oracle::gaussian_transform(spec_grid.x(k), spec_grid.t(l));
            EXPECT_NEAR(ft.at(k, l).real(), expected, 1e-12);
            EXPECT_NEAR(ft.at(k, l).imag(), 0.0, 1e-12);
        }
    }
    EXPECT_NEAR(ft.at(3, 3).real(), 0.5, 1e-12);
}

TEST(Dft2, Linearity)
{
    std::mt19937_64 rng(3);
    const auto g = grid_over(-2, 2, 24, 0.1, 3, 20);
    const auto s = grid_over(-4, 4, 9, -5, 5, 11);
    const auto a = random_field(g, rng);
    const auto b = random_field(g, rng);
    const auto lhs = dft2_forward(a + b, s);
    const auto fa = dft2_forward(a, s);
    const auto fb = dft2_forward(b, s);
    for (std::size_t k = 0; k < lhs.values().size(); ++k) {
        EXPECT_NEAR(std::abs(lhs.values()[k] - fa.values()[k] - fb.values()[k]), 0.0, 1e-12);
    }
}

TEST(Dft2, FastPathMatchesDefinition)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        std::uniform_real_distribution<double> u(-3, 3);
        const GridSpec g{u(rng), 0.1 + 0.05 * trial, 32, std::abs(u(rng)), 0.07, 32};
        const GridSpec s{-6.0, 0.4, 31, -9.0, 0.55, 33};
        const auto f = random_field(g, rng);
        const auto fast = dft2_forward(f, s);
        const auto direct = dft2_forward_direct(f, s);
        EXPECT_LE(max_abs_diff(fast, direct) / max_abs(direct), 1e-10);
    }
}

TEST(Dft2, SampledKernelMatchesSymbol)
{
    // S sampled on x in [-50, 50], t in (0, 150]; the t^-3/2 tail beyond 150
    // carries 3% of the mass at (0, 0), so the origin is left to the sheared
    // quadrature (KernelQuadrature tests).
    const double dt = 0.01;
    const GridSpec g{-50.0, 0.2, 501, dt, dt, 15000};
    const auto s = sample([](double x, double t) { return kernel_eval(KernelSpec::S(), x, t); }, g);
    const auto spec_grid = grid_over(-2, 2, 5, -2, 2, 5);
    const auto ft = dft2_forward(s, spec_grid);
    double worst = 0.0;
    for (std::size_t l = 0; l < 5; ++l) {
        for (std::size_t k = 0; k < 5; ++k) {
            if (k == 2 && l == 2) {
                continue;
            }
            const auto closed = s_hat(spec_grid.x(k), spec_grid.t(l));
            worst = std::max(worst, std::abs(ft.at(k, l) - closed) / std::abs(closed));
        }
    }
    EXPECT_LE(worst, 1e-3);
}

TEST(Dft2, Parseval)
{
    const double h = 0.1;
    const GridSpec g{-6, h, 121, -6, h, 121};
    const auto f = sample([](double x, double t) { return std::exp(-x * x / 2 - (t - 0.5) * (t - 0.5)) * (1 + 0.3 * x); }, g);
    const auto ft = dft2_forward(f, grid_over(-10, 10, 161, -10, 10, 161));
    EXPECT_NEAR(l2_norm(ft) / l2_norm(f), 1.0, 1e-2);
}

TEST(Idft2, RoundTrip)
{
    const double h = 0.1;
    const GridSpec g{-8, h, 161, -8, h, 161};
    const auto f = gaussian_on(g);
    const auto s = grid_over(-12, 12, 121, -12, 12, 121);
    // |f^|^2 = exp(-(z^2 + r^2)/2)/4; the square [-8, 8]^2 keeps all but ~1e-13 of it
    const auto back = idft2_windowed(dft2_forward(f, s), SpectralWindow::square(8.0), grid_over(-2, 2, 41, -2, 2, 41));
    const auto expected = gaussian_on(back.grid());
    EXPECT_LE(l2_distance(back, expected) / l2_norm(expected), 1e-3);
}

TEST(Idft2, NodeFreeWindowGivesZero)
{
    // even node count: no node at the origin
    const auto s = grid_over(-1, 1, 10, -1, 1, 10);
    std::vector<std::complex<double>> v(s.size(), {1.0, 0.5});
    const ComplexField spec(s, v);
    const auto out = idft2_windowed(spec, SpectralWindow::rect(0.05, 0.05), grid_over(0, 1, 5, 0, 1, 5));
    for (double x : out.values()) {
        EXPECT_EQ(x, 0.0);
    }
}

TEST(Idft2, RejectsAsymmetricSpectrumAndPoorCoverage)
{
    const auto s = grid_over(-2, 2, 21, -2, 2, 21);
    std::vector<std::complex<double>> v(s.size());
    for (std::size_t l = 0; l < s.nt; ++l) {
        for (std::size_t k = 0; k < s.nx; ++k) {
            v[l * s.nx + k] = {1.0 + s.x(k), 0.0};
        }
    }
    const ComplexField spec(s, v);
    EXPECT_THROW(idft2_windowed(spec, SpectralWindow::square(1.5), grid_over(0, 1, 5, 0, 1, 5)), NumericError);
    EXPECT_THROW(idft2_windowed(spec, SpectralWindow::square(2.5), grid_over(0, 1, 5, 0, 1, 5)), GridMismatch);
}

TEST(Idft2, PointsAgreeWithGrid)
{
    const GridSpec g{-8, 0.1, 161, -8, 0.1, 161};
    const auto ft = dft2_forward(gaussian_on(g), grid_over(-6, 6, 61, -6, 6, 61));
    const WindowedSpectrum ws(ft, SpectralWindow::rect(5.0, 4.0));
    const auto grid = grid_over(-1, 1, 5, -1, 1, 4);
    const auto on_grid = ws.on_grid(grid);
    std::vector<double> xs, ts;
    for (std::size_t j = 0; j < grid.nt; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            xs.push_back(grid.x(i));
            ts.push_back(grid.t(j));
        }
    }
    const auto pts = ws.at_points(xs, ts);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        EXPECT_NEAR(pts[k], on_grid.values()[k], 1e-13);
    }
}

TEST(Convolution, ZeroInput)
{
    const auto g = grid_over(-2, 2, 21, 0.05, 1, 20);
    const auto out = convolve2_causal(KernelSpec::S(), RealField::zeros(g), g);
    for (double v : out.values()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Convolution, FftMatchesDirectSum)
{
    std::mt19937_64 rng(5);
    const GridSpec g{-3, 0.15, 41, 0.02, 0.1, 30};
    const auto w = random_field(g, rng);
    for (const auto& spec : {KernelSpec::S(), KernelSpec::R()}) {
        const auto fast = convolve2_causal(spec, w, g);
        const auto direct = convolve2_causal_direct(spec, w, g);
        EXPECT_LE(l2_distance(fast, direct), 1e-12 * l2_norm(direct));
    }
    // aligned sub-grid goes through the FFT path and agrees with the full result
    const GridSpec sub{g.x(5), g.dx, 10, g.t(4), g.dt, 12};
    const auto part = convolve2_causal(KernelSpec::S(), w, sub);
    const auto full = convolve2_causal(KernelSpec::S(), w, g);
    for (std::size_t j = 0; j < sub.nt; ++j) {
        for (std::size_t i = 0; i < sub.nx; ++i) {
            EXPECT_NEAR(part.at(i, j), full.at(i + 5, j + 4), 1e-12);
        }
    }
    // an off-grid output falls back to the direct sum
    const GridSpec off{-0.33, 0.2, 5, 1.01, 0.3, 4};
    const auto a = convolve2_causal(KernelSpec::S(), w, off);
    const auto b = convolve2_causal_direct(KernelSpec::S(), w, off);
    EXPECT_EQ(l2_distance(a, b), 0.0);
}

TEST(Convolution, ShiftEquivariance)
{
    const GridSpec g{-4, 0.1, 81, 0.03, 0.05, 60};
    auto bump = [](double cx, double ct) {
        return [=](double x, double t) { return std::exp(-(x - cx) * (x - cx) * 4 - (t - ct) * (t - ct) * 20); };
    };
    const auto a = convolve2_causal(KernelSpec::S(), sample(bump(0.0, 0.8), g), g);
    const auto b = convolve2_causal(KernelSpec::S(), sample(bump(0.5, 1.05), g), g);
    // shift by 5 x-cells and 5 t-cells
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j + 5 < g.nt; ++j) {
        for (std::size_t i = 0; i + 5 < g.nx; ++i) {
            worst = std::max(worst, std::abs(b.at(i + 5, j + 5) - a.at(i, j)));
            scale = std::max(scale, std::abs(a.at(i, j)));
        }
    }
    EXPECT_LE(worst, 1e-6 * scale);
}

TEST(Convolution, ClosedFormHeatProfiles)
{
    const auto window = figure_window(ProblemId::P1);
    const auto g = residual_grid(window);
    const auto h0 = sample([](double x, double t) { return oracle::heat_profile(0.0, x, t); }, g);
    const auto h1 = sample([](double x, double t) { return oracle::heat_profile(1.0, x, t); }, g);
    const auto h4 = sample([](double x, double t) { return oracle::heat_profile(4.0, x, t); }, g);
    struct Case {
        KernelSpec k;
        const RealField* w;
        double c;
        double c_prime;
        double tol;
    };
    // h0 is singular at the origin; the others are smooth
    for (const auto& cs : {Case{KernelSpec::S(), &h0, 1.0, 0.0, 2e-3}, Case{KernelSpec::R(), &h1, 4.0, 1.0, 1e-3},
                           Case{KernelSpec::S(), &h4, 1.0, 4.0, 1e-3}}) {
        const auto got = crop(convolve2_causal(cs.k, *cs.w, g), window);
        const auto expected =
            sample([&](double x, double t) { return oracle::kernel_heat_convolution(cs.c, cs.c_prime, x, t); },
                   got.grid());
        EXPECT_LE(l2_distance(got, expected) / l2_norm(expected), cs.tol) << cs.c << ' ' << cs.c_prime;
    }
}

TEST(Convolution, CentralIdentity)
{
    const auto window = figure_window(ProblemId::P1);
    const auto g = residual_grid(window);
    const auto p1 = test_problem(ProblemId::P1);
    const auto v = sample(p1.v_exact, g);
    const auto f = sample(p1.f0, g);
    const auto gg = sample(p1.g0, g);
    const auto lhs = crop(convolve2_causal(KernelSpec::S(), v, g), window);
    const auto rhs = crop(assemble_rhs(f, gg), window);
    EXPECT_EQ(lhs.grid().nx, 129u);
    EXPECT_EQ(lhs.grid().nt, 129u);
    EXPECT_LE(l2_distance(lhs, rhs) / l2_norm(rhs), 1e-2);
}

TEST(Convolution, ConvolutionTheorem)
{
    // dft2(K * w) = 2 pi K^ w^ for a bump well inside t > 0
    const GridSpec g{-40, 0.1, 801, 0.05 * kHurwitzOffset, 0.05, 1600};
    const auto w = sample([](double x, double t) { return std::exp(-x * x / 2 - (t - 5) * (t - 5) / 2); }, g);
    const auto kw = convolve2_causal(KernelSpec::S(), w, g);
    const auto s = grid_over(-1, 1, 3, -2, 2, 5);
    const auto lhs = dft2_forward(kw, s);
    const auto wh = dft2_forward(w, s);
    for (std::size_t l = 0; l < s.nt; ++l) {
        for (std::size_t k = 0; k < s.nx; ++k) {
            if (s.t(l) == 0.0) {
                continue; // the t^-3/2 tail of K * w is cut at t = 80
            }
            const auto rhs = 2.0 * oracle::pi * s_hat(s.x(k), s.t(l)) * wh.at(k, l);
            EXPECT_LE(std::abs(lhs.at(k, l) - rhs) / std::abs(rhs), 1e-2) << s.x(k) << ' ' << s.t(l);
        }
    }
}

TEST(Convolution, InputChecks)
{
    const GridSpec g{-1, 0.1, 21, 0.5, 0.1, 10};
    const auto w = RealField::zeros(g);
    EXPECT_THROW(convolve2_causal(KernelSpec::S(), w, GridSpec{-1, 0.1, 21, 0.3, 0.1, 10}), GridMismatch);
    EXPECT_THROW(convolve2_causal(KernelSpec::S(), RealField::zeros(GridSpec{-1, 0.1, 21, -0.5, 0.1, 10}),
                                  GridSpec{-1, 0.1, 21, 0.0, 0.1, 10}),
                 DomainError);
    EXPECT_NEAR(gaussian_cutoff(1.0), std::sqrt(4.0 * std::log(1e12)), 1e-12);
    EXPECT_EQ(gaussian_cutoff(0.0), 0.0);
}
