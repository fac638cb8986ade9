#include "asvobs/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "asvobs/errors.hpp"

namespace asvobs {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

// Per-bin one-sided power |X_k|² / (N²·mean(w²)). With the rectangular window
// the bins sum exactly to the mean square of x.
std::vector<double> one_sided_power(std::span<const double> x, Window window) {
    const std::size_t n = x.size();
    if (n == 0) throw EmptyWindow("spectrum of an empty record");
    std::vector<double> in(x.begin(), x.end());
    double w2 = 1.0;
    if (window == Window::Hann && n > 1) {
        w2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
            in[i] *= w;
            w2 += w * w;
        }
        w2 /= static_cast<double>(n);
    }
    const std::size_t nb = n / 2 + 1;
    std::unique_ptr<fftw_complex[], decltype(&fftw_free)> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nb)), &fftw_free);
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.get(), FFTW_ESTIMATE));
    }
    fftw_execute(plan.get());
    std::vector<double> p(nb);
    const double n2 = static_cast<double>(n) * static_cast<double>(n) * w2;
    for (std::size_t k = 0; k < nb; ++k) {
        const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
        const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
        p[k] = (unpaired ? 1.0 : 2.0) * mag2 / n2;
    }
    return p;
}

double band_power(const std::vector<double>& p, std::size_t n, double dt, double f_lo, double f_hi) {
    const double df = 1.0 / (static_cast<double>(n) * dt);
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        if (f >= f_lo && f <= f_hi) s += p[k];
    }
    return s;
}

}  // namespace

double band_rms(std::span<const double> x, double dt, double f_lo, double f_hi, Window window) {
    const auto p = one_sided_power(x, window);
    return std::sqrt(band_power(p, x.size(), dt, f_lo, f_hi));
}

double band_energy_fraction(std::span<const double> x, double dt, double f_lo, double f_hi) {
    const auto p = one_sided_power(x, Window::Rectangular);
    double total = 0.0;
    for (double v : p) total += v;
    if (total == 0.0) return 0.0;
    return band_power(p, x.size(), dt, f_lo, f_hi) / total;
}

}  // namespace asvobs
