#include "asvobs/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "asvobs/bench_harness.hpp"
#include "asvobs/config_file.hpp"
#include "asvobs/errors.hpp"
#include "asvobs/lmi_synthesis.hpp"

namespace asvobs {

namespace {

constexpr const char* sweep_keys[] = {"delta_psi1", "delta_p1", "k_omega_p", "k_n_p"};

double& sweep_field(SynthesisConfig& c, const std::string& key) {
    if (key == "delta_psi1") return c.delta_psi1;
    if (key == "delta_p1") return c.delta_p1;
    if (key == "k_omega_p") return c.k_omega_p;
    return c.k_n_p;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp + " for writing");
        f << text;
        if (!f.flush()) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

// Maps a failure to its exit code and reports it.
int fail(std::exception_ptr e, std::ostream& err) {
    try {
        std::rethrow_exception(e);
    } catch (const RunFailed& f) {
        err << "error: seed " << f.seed << ": ";
        return fail(f.cause, err);
    } catch (const ParseError& x) {
        err << "error: " << x.what() << "\n";
        return exit_parse;
    } catch (const IoError& x) {
        err << "error: " << x.what() << "\n";
        return exit_parse;
    } catch (const InvalidConfig& x) {
        err << "error: invalid config: " << x.what() << "\n";
        return exit_parse;
    } catch (const Infeasible& x) {
        err << "error: infeasible: " << x.what() << "\n";
        return exit_infeasible;
    } catch (const DivergedRun& x) {
        err << "error: run diverged at step " << x.step << ": " << x.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& x) {
        err << "error: numerical failure: " << x.what() << "\n";
        return exit_numerical;
    }
}

ScenarioConfig load_config(const std::string& path) {
    try {
        return read_config_file(path);
    } catch (const NotPositiveDefinite& e) {
        throw InvalidConfig(e.what());
    }
}

int cmd_synth(const std::string& config_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const ScenarioConfig cfg = load_config(config_path);
    const SynthesisOutput s = synthesize_all(cfg.synthesis);
    out << "config_hash " << hex(config_hash(cfg.synthesis)) << "\n";
    print_report(out, s.rot_report);
    print_report(out, s.pos_report);
    if (!s.rot_report.pass || !s.pos_report.pass) {
        err << "error: certificate check failed; gains not written\n";
        return exit_certificate;
    }
    write_gains_file(out_path, s.gains);
    return exit_ok;
}

std::string summary_line(std::uint64_t seed, const ErrorStats& s, const RunRecord& rec) {
    std::string line = "seed " + std::to_string(seed);
    for (Channel c : all_channels) line += std::string(" std_e_") + channel_name(c) + " " + g17(s.get(c));
    line += " max_omega " + g17(rec.max_omega) + " max_noise " + g17(rec.max_noise);
    return line;
}

int cmd_simulate(const std::string& config_path, const std::string& gains_path, std::optional<std::uint64_t> seed,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg = load_config(config_path);
    const LoadedGains loaded = read_gains_file(gains_path);
    if (loaded.hash != config_hash(cfg.synthesis)) {
        err << "error: gains file hash " << hex(loaded.hash) << " does not match config hash "
            << hex(config_hash(cfg.synthesis)) << "\n";
        return exit_infeasible;
    }
    const GainsVerification v = verify_gains(loaded.gains);
    if (!v.pass()) {
        print_report(err, v.rot);
        print_report(err, v.pos);
        err << "error: stored gains do not verify\n";
        return exit_certificate;
    }
    if (seed) cfg.seed = *seed;
    const RunRecord rec = run_scenario(cfg, loaded.gains);
    if (!out_path.empty()) export_csv(rec, out_path);
    out << summary_line(cfg.seed, error_std(rec, cfg.warmup), rec) << "\n";
    return exit_ok;
}

int cmd_bench(const std::string& config_path, const std::string& sweep_text, std::size_t n_seeds,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
    const ScenarioConfig cfg = load_config(config_path);
    const SweepSpec sweep = parse_sweep(sweep_text);
    if (n_seeds == 0) throw ParseError("--seeds must be at least 1");

    std::ostringstream table;
    table << sweep.key;
    for (Channel c : all_channels) table << ",std_e_" << channel_name(c);
    for (Channel c : all_channels) table << ",spread_e_" << channel_name(c);
    table << ",e_v_low_rms,v_hat_mid_rms\n";

    std::vector<std::uint64_t> seeds(n_seeds);
    for (std::size_t i = 0; i < n_seeds; ++i) seeds[i] = i + 1;
    for (double value : sweep.values) {
        ScenarioConfig c = cfg;
        sweep_field(c.synthesis, sweep.key) = value;
        c.validate();
        const SynthesisOutput s = synthesize_all(c.synthesis);
        if (!s.rot_report.pass || !s.pos_report.pass) {
            print_report(err, s.rot_report);
            print_report(err, s.pos_report);
            err << "error: certificate check failed at " << sweep.key << " = " << g17(value) << "\n";
            return exit_certificate;
        }
        const MonteCarloStats mc = monte_carlo(c, seeds, s.gains);
        table << g17(value);
        for (Channel ch : all_channels) table << "," << g17(mc.mean.get(ch));
        for (Channel ch : all_channels) table << "," << g17(mc.spread.get(ch));
        table << "," << g17(mc.mean_band.e_v_low) << "," << g17(mc.mean_band.v_hat_mid) << "\n";
    }
    if (out_path.empty())
        out << table.str();
    else
        write_text_atomic(out_path, table.str());
    return exit_ok;
}

int cmd_verify(const std::string& gains_path, const std::string& config_path, std::optional<double> tol,
               std::ostream& out, std::ostream& err) {
    const LoadedGains loaded = read_gains_file(gains_path);
    if (!config_path.empty()) {
        const ScenarioConfig cfg = load_config(config_path);
        if (loaded.hash != config_hash(cfg.synthesis)) {
            err << "error: gains file hash " << hex(loaded.hash) << " does not match config hash "
                << hex(config_hash(cfg.synthesis)) << "\n";
            return exit_infeasible;
        }
    }
    if (loaded.hash != config_hash(loaded.gains.config)) {
        err << "error: gains header hash does not match its config echo\n";
        return exit_parse;
    }
    VerifyTolerance t;
    if (tol) {
        if (!(*tol >= 0.0)) throw ParseError("--tol must be >= 0");
        t.block = t.pole = *tol;
    }
    const GainsVerification v = verify_gains(loaded.gains, t);
    print_report(out, v.rot);
    print_report(out, v.pos);
    out << (v.pass() ? "all certificates pass" : "certificate failure") << "\n";
    return v.pass() ? exit_ok : exit_certificate;
}

}  // namespace

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("sweep must look like KEY=v1,v2,...");
    SweepSpec s;
    s.key = text.substr(0, eq);
    if (std::find(std::begin(sweep_keys), std::end(sweep_keys), s.key) == std::end(sweep_keys))
        throw ParseError("unknown sweep key '" + s.key + "'");
    std::stringstream ss(text.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ParseError("sweep value is not a number: '" + item + "'");
        }
        if (pos != item.size()) throw ParseError("sweep value is not a number: '" + item + "'");
        s.values.push_back(v);
    }
    if (s.values.empty()) throw ParseError("sweep needs at least one value");
    return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cascade observer synthesis and benchmarks", "asvobs"};
    app.require_subcommand(1);

    std::string config, out_path, gains, sweep;
    std::uint64_t seed = 0;
    std::size_t seeds = 1;
    double tol = 0.0;

    auto* synth = app.add_subcommand("synth", "Solve both LMI programs and write a gains file");
    synth->add_option("--config", config, "Config file")->required();
    synth->add_option("--out", out_path, "Gains file to write")->required();

    auto* simulate = app.add_subcommand("simulate", "Run one scenario with stored gains");
    simulate->add_option("--config", config, "Config file")->required();
    simulate->add_option("--gains", gains, "Gains file")->required();
    auto* seed_opt = simulate->add_option("--seed", seed, "Overrides the config seed");
    simulate->add_option("--out", out_path, "CSV trace to write");

    auto* bench = app.add_subcommand("bench", "Sweep one synthesis parameter over seeds 1..N");
    bench->add_option("--config", config, "Config file")->required();
    bench->add_option("--sweep", sweep, "KEY=v1,v2,... with KEY in delta_psi1, delta_p1, k_omega_p, k_n_p")
        ->required();
    bench->add_option("--seeds", seeds, "Number of seeds")->capture_default_str();
    bench->add_option("--out", out_path, "CSV table to write (standard output if omitted)");

    auto* verify = app.add_subcommand("verify", "Re-check the certificates of a gains file");
    verify->add_option("--gains", gains, "Gains file")->required();
    verify->add_option("--config", config, "Config the gains must belong to");
    auto* tol_opt = verify->add_option("--tol", tol, "Block and pole tolerance");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_parse;
    }

    try {
        if (*synth) return cmd_synth(config, out_path, out, err);
        if (*simulate)
            return cmd_simulate(config, gains, *seed_opt ? std::optional(seed) : std::nullopt, out_path, out, err);
        if (*bench) return cmd_bench(config, sweep, seeds, out_path, out, err);
        return cmd_verify(gains, config, *tol_opt ? std::optional(tol) : std::nullopt, out, err);
    } catch (...) {
        return fail(std::current_exception(), err);
    }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, out, err);
}

}  // namespace asvobs
