#include "asvobs/config_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "asvobs/errors.hpp"

namespace asvobs {

namespace {

using DoubleRef = std::function<double&(ScenarioConfig&)>;

struct Section {
    std::map<std::string, DoubleRef> doubles;
};

const std::map<std::string, Section>& double_fields() {
    static const std::map<std::string, Section> table = [] {
        std::map<std::string, Section> t;
        auto& v = t["vessel"].doubles;
#define ASVOBS_VESSEL(name) v[#name] = [](ScenarioConfig& c) -> double& { return c.vessel.name; }
        ASVOBS_VESSEL(m);
        ASVOBS_VESSEL(I_z);
        ASVOBS_VESSEL(x_g);
        ASVOBS_VESSEL(X_udot);
        ASVOBS_VESSEL(Y_vdot);
        ASVOBS_VESSEL(Y_rdot);
        ASVOBS_VESSEL(N_vdot);
        ASVOBS_VESSEL(N_rdot);
        ASVOBS_VESSEL(X_u);
        ASVOBS_VESSEL(X_uu);
        ASVOBS_VESSEL(Y_v);
        ASVOBS_VESSEL(Y_vv);
        ASVOBS_VESSEL(Y_vr);
        ASVOBS_VESSEL(Y_r);
        ASVOBS_VESSEL(Y_rv);
        ASVOBS_VESSEL(Y_rr);
        ASVOBS_VESSEL(N_v);
        ASVOBS_VESSEL(N_vv);
        ASVOBS_VESSEL(N_vr);
        ASVOBS_VESSEL(N_r);
        ASVOBS_VESSEL(N_rv);
        ASVOBS_VESSEL(N_rr);
#undef ASVOBS_VESSEL
        auto& s = t["synthesis"].doubles;
#define ASVOBS_SYNTH(name) s[#name] = [](ScenarioConfig& c) -> double& { return c.synthesis.name; }
        ASVOBS_SYNTH(delta_psi1);
        ASVOBS_SYNTH(delta_p1);
        ASVOBS_SYNTH(k_omega_p);
        ASVOBS_SYNTH(k_n_p);
        ASVOBS_SYNTH(r_min);
        ASVOBS_SYNTH(r_max);
        ASVOBS_SYNTH(p_min);
        ASVOBS_SYNTH(gain_reg);
        ASVOBS_SYNTH(eps_feas);
#undef ASVOBS_SYNTH
        auto& n = t["noise"].doubles;
        n["bound"] = [](ScenarioConfig& c) -> double& { return c.noise.bound; };
        n["f_min"] = [](ScenarioConfig& c) -> double& { return c.noise.f_min; };
        n["f_max"] = [](ScenarioConfig& c) -> double& { return c.noise.f_max; };
        auto& sc = t["scenario"].doubles;
        sc["duration"] = [](ScenarioConfig& c) -> double& { return c.duration; };
        sc["dt"] = [](ScenarioConfig& c) -> double& { return c.dt; };
        sc["warmup"] = [](ScenarioConfig& c) -> double& { return c.warmup; };
        sc["x0"] = [](ScenarioConfig& c) -> double& { return c.eta0.x; };
        sc["y0"] = [](ScenarioConfig& c) -> double& { return c.eta0.y; };
        sc["psi0"] = [](ScenarioConfig& c) -> double& { return c.eta0.psi; };
        sc["u0"] = [](ScenarioConfig& c) -> double& { return c.nu0.u; };
        sc["v0"] = [](ScenarioConfig& c) -> double& { return c.nu0.v; };
        sc["r0"] = [](ScenarioConfig& c) -> double& { return c.nu0.r; };
        t["signals"];
        return t;
    }();
    return table;
}

constexpr const char* control_channels[] = {"F_u", "tau_r"};
constexpr const char* disturbance_channels[] = {"F_wu", "F_wv", "tau_wr"};

Range* signal_range(ScenarioConfig& c, const std::string& key) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) return nullptr;
    const std::string channel = key.substr(0, dot);
    const std::string param = key.substr(dot + 1);
    ChannelRanges* ch = nullptr;
    for (std::size_t i = 0; i < 2; ++i)
        if (channel == control_channels[i]) ch = &c.control.at(i);
    for (std::size_t i = 0; i < 3; ++i)
        if (channel == disturbance_channels[i]) ch = &c.disturbance.at(i);
    if (!ch) return nullptr;
    if (param == "bias") return &ch->bias;
    if (param == "amplitude") return &ch->amplitude;
    if (param == "frequency") return &ch->frequency;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, int line) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ParseError("not a number: '" + s + "'", line);
    return v;
}

std::uint64_t to_u64(const std::string& s, int line) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ParseError("not a non-negative integer: '" + s + "'", line);
    return v;
}

Range to_range(const std::string& s, int line) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        const double v = to_double(s, line);
        return {v, v};
    }
    return {to_double(trim(s.substr(0, comma)), line), to_double(trim(s.substr(comma + 1)), line)};
}

}  // namespace

ScenarioConfig parse_config(std::istream& is) {
    ScenarioConfig c = noiseless_scenario();
    const auto& table = double_fields();
    std::string section;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (const auto h = s.find_first_of("#;"); h != std::string::npos) s.erase(h);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("malformed section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (!table.contains(section)) throw ParseError("unknown section [" + section + "]", line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", line);
        if (section.empty()) throw ParseError("key '" + key + "' outside any section", line);
        if (!seen.insert(section + "." + key).second)
            throw ParseError("duplicate key '" + key + "' in [" + section + "]", line);

        const auto& doubles = table.at(section).doubles;
        if (auto it = doubles.find(key); it != doubles.end()) {
            it->second(c) = to_double(value, line);
        } else if (section == "signals") {
            Range* r = signal_range(c, key);
            if (!r) throw ParseError("unknown key '" + key + "' in [signals]", line);
            *r = to_range(value, line);
        } else if (section == "noise" && key == "components") {
            const std::uint64_t n = to_u64(value, line);
            if (n > 1000) throw ParseError("components must be at most 1000", line);
            c.noise.components = static_cast<int>(n);
        } else if (section == "scenario" && key == "seed") {
            c.seed = to_u64(value, line);
        } else if (section == "scenario" && key == "plant") {
            if (value == "full")
                c.plant = PlantKind::Full;
            else if (value == "surrogate")
                c.plant = PlantKind::Surrogate;
            else
                throw ParseError("plant must be full or surrogate", line);
        } else if (section == "scenario" && key == "measurement") {
            if (value == "continuous")
                c.measurement = MeasurementMode::Continuous;
            else if (value == "sampled")
                c.measurement = MeasurementMode::Sampled;
            else
                throw ParseError("measurement must be continuous or sampled", line);
        } else {
            throw ParseError("unknown key '" + key + "' in [" + section + "]", line);
        }
    }
    c.synthesis.M = inertia_matrix(c.vessel);
    c.validate();
    return c;
}

ScenarioConfig read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config " + path);
    return parse_config(f);
}

void write_config(std::ostream& os, const ScenarioConfig& config) {
    ScenarioConfig c = config;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const char* section : {"vessel", "synthesis", "signals", "noise", "scenario"}) {
        os << "[" << section << "]\n";
        for (const auto& [key, ref] : double_fields().at(section).doubles) os << key << " = " << num(ref(c)) << "\n";
        if (std::string(section) == "signals") {
            auto put = [&](const char* ch, const ChannelRanges& r) {
                os << ch << ".bias = " << num(r.bias.min) << ", " << num(r.bias.max) << "\n";
                os << ch << ".amplitude = " << num(r.amplitude.min) << ", " << num(r.amplitude.max) << "\n";
                os << ch << ".frequency = " << num(r.frequency.min) << ", " << num(r.frequency.max) << "\n";
            };
            for (std::size_t i = 0; i < 2; ++i) put(control_channels[i], c.control.at(i));
            for (std::size_t i = 0; i < 3; ++i) put(disturbance_channels[i], c.disturbance.at(i));
        } else if (std::string(section) == "noise") {
            os << "components = " << c.noise.components << "\n";
        } else if (std::string(section) == "scenario") {
            os << "seed = " << c.seed << "\n";
            os << "plant = " << (c.plant == PlantKind::Full ? "full" : "surrogate") << "\n";
            os << "measurement = " << (c.measurement == MeasurementMode::Continuous ? "continuous" : "sampled")
               << "\n";
        }
    }
}

}  // namespace asvobs
