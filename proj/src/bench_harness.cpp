#include "asvobs/bench_harness.hpp"

#include "asvobs/errors.hpp"
#include "asvobs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <thread>

namespace asvobs {

namespace {

constexpr std::uint64_t control_stream = 1;
constexpr std::uint64_t disturbance_stream = 2;
constexpr std::uint64_t noise_stream = 3;

// One step of plant and observer as a single 15-state ODE: [η, ν, χ̂_ψ, χ̂_p].
// Inputs are held over the step; the measurement follows the plant through the stages.
void co_integrate(const VesselModel& plant, const CascadeObserver& obs, PlantKind kind, const GpsNoise& noise,
                  const ControlInput& tau, const EnvDisturbance& tw, const LumpedDisturbance& sigma, double t0,
                  double dt, int n_sub, VesselState& x, ObserverEstimates& est) {
    auto f = [&](double t, const Vector& s) {
        const VesselState vs{{s[0], s[1], s[2]}, {s[3], s[4], s[5]}};
        const StateRate sr = kind == PlantKind::Full ? plant.derivative(vs, tau, tw)
                                                     : plant.derivative_prescribed(vs, tau, sigma);
        const Measurement y = measure(vs.eta, noise(t));
        const Vector dr = obs.rotational_rate(std::span(s).subspan(6, 3), y, tau);
        const Vector dp = obs.positional_rate(std::span(s).subspan(9, 6), y, tau);
        Vector d{sr.eta_dot.x, sr.eta_dot.y, sr.eta_dot.psi, sr.nu_dot.u, sr.nu_dot.v, sr.nu_dot.r};
        d.insert(d.end(), dr.begin(), dr.end());
        d.insert(d.end(), dp.begin(), dp.end());
        return d;
    };
    Vector s{x.eta.x, x.eta.y, x.eta.psi, x.nu.u, x.nu.v, x.nu.r};
    const Vector r = to_vector(est.rot), p = to_vector(est.pos);
    s.insert(s.end(), r.begin(), r.end());
    s.insert(s.end(), p.begin(), p.end());
    const double h = dt / n_sub;
    for (int i = 0; i < n_sub; ++i) s = rk4_step(f, s, t0 + i * h, h);
    x = {{s[0], s[1], s[2]}, {s[3], s[4], s[5]}};
    est = {rotational_from(std::span(s).subspan(6, 3)), positional_from(std::span(s).subspan(9, 6))};
}

}  // namespace

void ScenarioConfig::validate() const {
    const double v[] = {duration, dt, warmup};
    if (!all_finite(v)) throw InvalidConfig("scenario times must be finite");
    if (!(dt > 0.0)) throw InvalidConfig("dt must be > 0");
    if (!(duration > 0.0)) throw InvalidConfig("duration must be > 0");
    if (!(warmup >= 0.0 && warmup < duration)) throw InvalidConfig("need 0 <= warmup < duration");
    if (control.size() != 2) throw InvalidConfig("control needs 2 channels");
    if (disturbance.size() != 3) throw InvalidConfig("disturbance needs 3 channels");
    for (const auto& c : control) c.validate();
    for (const auto& c : disturbance) c.validate();
    noise.validate(dt);
    vessel.validate();
    synthesis.validate();
}

ScenarioConfig noiseless_scenario() { return {}; }

ScenarioConfig noisy_scenario() {
    ScenarioConfig c;
    c.noise.bound = 0.2;
    c.synthesis.k_omega_p = 1.0;
    c.synthesis.k_n_p = 1.0;
    c.synthesis.delta_psi1 = 1.2;
    c.synthesis.delta_p1 = 1.2;
    return c;
}

std::size_t ScenarioConfig::steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

RunRecord run_scenario(const ScenarioConfig& config) {
    config.validate();
    SynthesisOutput out = synthesize_all(config.synthesis);
    return run_scenario(config, out.gains);
}

RunRecord run_scenario(const ScenarioConfig& config, const ObserverGains& gains) {
    config.validate();
    const VesselModel plant(config.vessel);
    const CascadeObserver obs(gains, plant.M_inv());
    const SinusoidSpec control(config.control, derive_seed(config.seed, control_stream));
    const SinusoidSpec disturbance(config.disturbance, derive_seed(config.seed, disturbance_stream));
    const GpsNoise noise(config.noise, derive_seed(config.seed, noise_stream));

    const std::size_t n = config.steps();
    const double dt = config.dt;
    RunRecord rec;
    rec.observer_substeps = obs.substeps(dt);
    rec.rows.reserve(n + 1);
    VesselState x{config.eta0, config.nu0};
    ObserverEstimates est;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        const ControlInput tau = sample_control(t, control);
        const EnvDisturbance tw = sample_env_disturbance(t, disturbance);
        LumpedDisturbance sigma;
        if (config.plant == PlantKind::Full) {
            sigma = plant.lumped_disturbance(x.nu, tw);
        } else {
            const Vector s = plant.M_inv() * to_vector(tw);
            sigma = {s[0], s[1], s[2]};
        }
        const auto n_p = noise(t);
        const Measurement y = measure(x.eta, n_p);
        rec.max_noise = std::max(rec.max_noise, norm_inf(n_p));
        rec.max_noise_2 = std::max(rec.max_noise_2, std::hypot(n_p[0], n_p[1]));
        if (!rec.rows.empty()) {
            const auto& p = rec.rows.back().sigma;
            const double d[] = {sigma.sigma_u - p.sigma_u, sigma.sigma_v - p.sigma_v, sigma.sigma_r - p.sigma_r};
            rec.max_omega = std::max(rec.max_omega, norm2(d) / dt);
        }
        rec.rows.push_back({t, x.eta, x.nu, sigma, y, est});
        if (k == n) break;
        try {
            if (config.measurement == MeasurementMode::Sampled) {
                est = obs.step(est, y, tau, dt);
                x = config.plant == PlantKind::Full ? plant.step(x, tau, tw, dt)
                                                    : plant.step_prescribed(x, tau, sigma, dt);
            } else {
                co_integrate(plant, obs, config.plant, noise, tau, tw, sigma, t, dt, rec.observer_substeps, x, est);
            }
        } catch (const NonFinite& e) {
            throw DivergedRun(std::string("run diverged at step ") + std::to_string(k) + ": " + e.what(), k);
        }
    }
    return rec;
}

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::u: return "u";
        case Channel::v: return "v";
        case Channel::r: return "r";
        case Channel::sigma_u: return "sigma_u";
        case Channel::sigma_v: return "sigma_v";
        case Channel::sigma_r: return "sigma_r";
    }
    return "?";
}

double ErrorStats::get(Channel c) const { return const_cast<ErrorStats*>(this)->get(c); }

double& ErrorStats::get(Channel c) {
    switch (c) {
        case Channel::u: return u;
        case Channel::v: return v;
        case Channel::r: return r;
        case Channel::sigma_u: return sigma_u;
        case Channel::sigma_v: return sigma_v;
        case Channel::sigma_r: return sigma_r;
    }
    throw std::invalid_argument("bad channel");
}

namespace {

double truth(const RunRow& row, Channel c) {
    switch (c) {
        case Channel::u: return row.nu.u;
        case Channel::v: return row.nu.v;
        case Channel::r: return row.nu.r;
        case Channel::sigma_u: return row.sigma.sigma_u;
        case Channel::sigma_v: return row.sigma.sigma_v;
        case Channel::sigma_r: return row.sigma.sigma_r;
    }
    return 0.0;
}

double estimate(const RunRow& row, Channel c) {
    switch (c) {
        case Channel::u: return row.est.pos.u_hat;
        case Channel::v: return row.est.pos.v_hat;
        case Channel::r: return row.est.rot.r_hat;
        case Channel::sigma_u: return row.est.pos.sigma_u_hat;
        case Channel::sigma_v: return row.est.pos.sigma_v_hat;
        case Channel::sigma_r: return row.est.rot.sigma_r_hat;
    }
    return 0.0;
}

// Rows are on a uniform grid, so the comparison allows for rounding in t.
bool in_window(const RunRow& row, double warmup) { return row.t >= warmup - 1e-9; }

}  // namespace

std::vector<double> error_series(const RunRecord& rec, Channel c, double warmup) {
    std::vector<double> out;
    for (const auto& row : rec.rows)
        if (in_window(row, warmup)) out.push_back(truth(row, c) - estimate(row, c));
    return out;
}

std::vector<double> estimate_series(const RunRecord& rec, Channel c, double warmup) {
    std::vector<double> out;
    for (const auto& row : rec.rows)
        if (in_window(row, warmup)) out.push_back(estimate(row, c));
    return out;
}

double population_std(std::span<const double> x) {
    if (x.empty()) throw EmptyWindow("no samples in the statistics window");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

ErrorStats error_std(const RunRecord& rec, double warmup) {
    ErrorStats s;
    for (Channel c : all_channels) s.get(c) = population_std(error_series(rec, c, warmup));
    return s;
}

BandStats band_stats(const RunRecord& rec, double warmup, double dt) {
    BandStats b;
    b.e_v_low = band_rms(error_series(rec, Channel::v, warmup), dt, 0.0, low_band_hi, Window::Hann);
    b.v_hat_mid = band_rms(estimate_series(rec, Channel::v, warmup), dt, mid_band_lo, mid_band_hi, Window::Hann);
    return b;
}

MonteCarloStats monte_carlo(const ScenarioConfig& config, std::size_t n_seeds) {
    if (n_seeds == 0) throw std::invalid_argument("monte_carlo: need at least one seed");
    std::vector<std::uint64_t> seeds(n_seeds);
    for (std::size_t i = 0; i < n_seeds; ++i) seeds[i] = i + 1;
    return monte_carlo(config, std::move(seeds));
}

MonteCarloStats monte_carlo(const ScenarioConfig& config, std::vector<std::uint64_t> seeds,
                            const std::optional<ObserverGains>& gains) {
    if (seeds.empty()) throw std::invalid_argument("monte_carlo: need at least one seed");
    config.validate();
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    const ObserverGains g = gains ? *gains : synthesize_all(config.synthesis).gains;

    MonteCarloStats out;
    out.seeds = seeds;
    out.per_seed.resize(seeds.size());
    out.per_seed_band.resize(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < seeds.size(); base += workers) {
        std::vector<std::future<void>> batch;
        for (std::size_t i = base; i < std::min(seeds.size(), base + workers); ++i)
            batch.push_back(std::async(std::launch::async, [&, i] {
                try {
                    ScenarioConfig c = config;
                    c.seed = seeds[i];
                    const auto rec = run_scenario(c, g);
                    out.per_seed[i] = error_std(rec, c.warmup);
                    out.per_seed_band[i] = band_stats(rec, c.warmup, c.dt);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }));
        for (auto& f : batch) f.get();
    }
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (errors[i]) {
            std::string what = "run failed";
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            throw RunFailed(seeds[i], what, errors[i]);
        }

    const double n = static_cast<double>(seeds.size());
    for (Channel c : all_channels) {
        double m = 0.0;
        for (const auto& s : out.per_seed) m += s.get(c);
        m /= n;
        double ss = 0.0;
        for (const auto& s : out.per_seed) ss += (s.get(c) - m) * (s.get(c) - m);
        out.mean.get(c) = m;
        out.spread.get(c) = std::sqrt(ss / n);
    }
    for (const auto& b : out.per_seed_band) {
        out.mean_band.e_v_low += b.e_v_low / n;
        out.mean_band.v_hat_mid += b.v_hat_mid / n;
    }
    return out;
}

void write_csv(std::ostream& os, const RunRecord& rec) {
    os << csv_header << "\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << (last ? '\n' : ',');
    };
    for (const auto& r : rec.rows) {
        put(r.t);
        put(r.eta.x);
        put(r.eta.y);
        put(wrap_angle(r.eta.psi));
        put(r.nu.u);
        put(r.nu.v);
        put(r.nu.r);
        put(r.sigma.sigma_u);
        put(r.sigma.sigma_v);
        put(r.sigma.sigma_r);
        put(r.y.x);
        put(r.y.y);
        put(wrap_angle(r.y.psi));
        put(r.est.pos.x_hat);
        put(r.est.pos.y_hat);
        put(wrap_angle(r.est.rot.psi_hat));
        put(r.est.pos.u_hat);
        put(r.est.pos.v_hat);
        put(r.est.rot.r_hat);
        put(r.est.pos.sigma_u_hat);
        put(r.est.pos.sigma_v_hat);
        put(r.est.rot.sigma_r_hat, true);
    }
}

void export_csv(const RunRecord& rec, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw IoError("cannot open " + tmp + " for writing");
        write_csv(f, rec);
        f.flush();
        if (!f) throw IoError("write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

}  // namespace asvobs
