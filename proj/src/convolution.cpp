#include "sidecast/errors.hpp"
#include "sidecast/parallel.hpp"
#include "sidecast/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>

namespace sidecast {

namespace {

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using fftw_buffer = std::unique_ptr<T[], FftwFree>;

template <class T>
fftw_buffer<T> fftw_alloc(std::size_t n)
{
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (!p) {
        throw NumericError("FFT buffer allocation failed");
    }
    return fftw_buffer<T>(p);
}

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p)
    {
        if (!plan_) {
            throw NumericError("FFTW could not create a plan");
        }
    }
    ~Plan()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    void run() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

struct Offset {
    std::size_t i;
    std::size_t j;
};

bool near_integer(double v, double& rounded)
{
    rounded = std::round(v);
    return std::abs(v - rounded) < 1e-6;
}

// Position of out_grid inside w's grid when its nodes are a subset of w's.
std::optional<Offset> aligned_offset(const GridSpec& w, const GridSpec& out)
{
    if (std::abs(out.dx - w.dx) > 1e-12 * w.dx || std::abs(out.dt - w.dt) > 1e-12 * w.dt) {
        return std::nullopt;
    }
    double oi = 0.0;
    double oj = 0.0;
    if (!near_integer((out.x0 - w.x0) / w.dx, oi) || !near_integer((out.t0 - w.t0) / w.dt, oj)) {
        return std::nullopt;
    }
    if (oi < 0.0 || oj < 0.0) {
        return std::nullopt;
    }
    const auto i = static_cast<std::size_t>(oi);
    const auto j = static_cast<std::size_t>(oj);
    if (i + out.nx > w.nx || j + out.nt > w.nt) {
        return std::nullopt;
    }
    return Offset{i, j};
}

void check_causal_inputs(const RealField& w, const GridSpec& out_grid)
{
    out_grid.validate();
    const auto& g = w.grid();
    if (g.t0 < 0.0) {
        throw DomainError("convolution input must start at t >= 0 (t0 = " + format_number(g.t0) + ")");
    }
    if (out_grid.t0 < g.t0 - 1e-9 * g.dt) {
        throw GridMismatch("output grid starts at t = " + format_number(out_grid.t0) + ", before the input at t = "
                           + format_number(g.t0));
    }
}

// Full-grid discrete causal convolution via zero-padded real FFTs.
std::vector<double> fft_convolve(const KernelSpec& spec, const RealField& w)
{
    const auto& g = w.grid();
    const std::size_t px = 2 * g.nx;
    const std::size_t pt = 2 * g.nt;
    const std::size_t pxc = px / 2 + 1;
    const std::size_t nreal = px * pt;
    const std::size_t ncplx = pt * pxc;

    auto kbuf = fftw_alloc<double>(nreal);
    auto wbuf = fftw_alloc<double>(nreal);
    auto kspec = fftw_alloc<fftw_complex>(ncplx);
    auto wspec = fftw_alloc<fftw_complex>(ncplx);
    std::fill(kbuf.get(), kbuf.get() + nreal, 0.0);
    std::fill(wbuf.get(), wbuf.get() + nreal, 0.0);

    // Kernel lag (l dx, k dt) sits at row k, column l mod px. Lag k = 0 is zero.
    parallel_for(g.nt, [&](std::size_t k) {
        if (k == 0) {
            return;
        }
        const double s = static_cast<double>(k) * g.dt;
        const double reach = gaussian_cutoff(s);
        double* row = kbuf.get() + k * px;
        const long lmax = static_cast<long>(g.nx) - 1;
        for (long l = -lmax; l <= lmax; ++l) {
            const double x = static_cast<double>(l) * g.dx;
            if (std::abs(x) > reach) {
                continue;
            }
            const auto col = static_cast<std::size_t>(l < 0 ? l + static_cast<long>(px) : l);
            row[col] = kernel_eval(spec, x, s);
        }
    });
    const auto values = w.values();
    for (std::size_t j = 0; j < g.nt; ++j) {
        std::copy(values.begin() + static_cast<long>(j * g.nx), values.begin() + static_cast<long>((j + 1) * g.nx),
                  wbuf.get() + j * px);
    }

    std::unique_ptr<Plan> fk, fw, back;
    {
        std::lock_guard lock(planner_mutex());
        fk = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(static_cast<int>(pt), static_cast<int>(px), kbuf.get(),
                                                         kspec.get(), FFTW_ESTIMATE));
        fw = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(static_cast<int>(pt), static_cast<int>(px), wbuf.get(),
                                                         wspec.get(), FFTW_ESTIMATE));
        back = std::make_unique<Plan>(fftw_plan_dft_c2r_2d(static_cast<int>(pt), static_cast<int>(px), wspec.get(),
                                                           wbuf.get(), FFTW_ESTIMATE));
    }
    fk->run();
    fw->run();
    for (std::size_t n = 0; n < ncplx; ++n) {
        const double ar = kspec[n][0];
        const double ai = kspec[n][1];
        const double br = wspec[n][0];
        const double bi = wspec[n][1];
        wspec[n][0] = ar * br - ai * bi;
        wspec[n][1] = ar * bi + ai * br;
    }
    back->run();

    const double scale = g.cell_area() / static_cast<double>(nreal);
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < g.nt; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            out[j * g.nx + i] = wbuf[j * px + i] * scale;
        }
    }
    return out;
}

} // namespace

double gaussian_cutoff(double s)
{
    static const double four_log = 4.0 * std::log(1.0e12);
    return s > 0.0 ? std::sqrt(four_log * s) : 0.0;
}

RealField convolve2_causal(const KernelSpec& spec, const RealField& w, const GridSpec& out_grid)
{
    check_causal_inputs(w, out_grid);
    const auto offset = aligned_offset(w.grid(), out_grid);
    if (!offset) {
        return convolve2_causal_direct(spec, w, out_grid);
    }
    const auto& g = w.grid();
    const auto full = fft_convolve(spec, w);
    std::vector<double> out(out_grid.size());
    for (std::size_t j = 0; j < out_grid.nt; ++j) {
        for (std::size_t i = 0; i < out_grid.nx; ++i) {
            out[j * out_grid.nx + i] = full[(j + offset->j) * g.nx + i + offset->i];
        }
    }
    return RealField(out_grid, std::move(out));
}

RealField convolve2_causal_direct(const KernelSpec& spec, const RealField& w, const GridSpec& out_grid)
{
    check_causal_inputs(w, out_grid);
    const auto& g = w.grid();
    std::vector<double> out(out_grid.size());
    parallel_for(out_grid.nt, [&](std::size_t jo) {
        const double t = out_grid.t(jo);
        for (std::size_t io = 0; io < out_grid.nx; ++io) {
            const double x = out_grid.x(io);
            double acc = 0.0;
            for (std::size_t j = 0; j < g.nt; ++j) {
                const double s = t - g.t(j);
                if (!(s > 0.0)) {
                    break;
                }
                const double reach = gaussian_cutoff(s);
                const double lo = std::ceil((x - reach - g.x0) / g.dx);
                const double hi = std::floor((x + reach - g.x0) / g.dx);
                const auto i0 = static_cast<std::size_t>(std::max(0.0, lo));
                const auto i1 = static_cast<long>(std::min(static_cast<double>(g.nx) - 1.0, hi));
                for (long i = static_cast<long>(i0); i <= i1; ++i) {
                    const double d = x - g.x(static_cast<std::size_t>(i));
                    if (std::abs(d) > reach) {
                        continue;
                    }
                    acc += kernel_eval(spec, d, s) * w.at(static_cast<std::size_t>(i), j);
                }
            }
            out[jo * out_grid.nx + io] = acc * g.cell_area();
        }
    });
    return RealField(out_grid, std::move(out));
}

} // namespace sidecast
