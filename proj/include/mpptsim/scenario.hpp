#pragma once
// Scenario configuration: a flat "key = value" text format with '#'
// comments. Unknown keys, malformed values and out-of-range values
// are rejected with the offending line number. serialize() and
// parse() round-trip exactly.

#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "controller.hpp"
#include "plant.hpp"
#include "power_model.hpp"

namespace mpptsim {

struct ScenarioError : std::runtime_error {
    int line;
    ScenarioError(int line_no, const std::string& msg)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
};

// uW/MHz-space coefficients fitted to the shipped typical-corner
// (TT, 27 C) measurements; the baked-in default power model.
inline std::pair<double, double> default_power_fit_uw() {
    static const VoltagePowerSample samples[] = {{1.2, 7.28}, {0.6, 1.22}, {0.4, 0.53}};
    const PowerModelParams p = calibrate(samples);
    return {p.dynamic_coeff * 1e12, p.leakage_coeff * 1e6};
}

struct ScenarioConfig {
    // controller
    std::uint8_t averaging = 0;        // 0..3 -> window 1/8/32/64
    std::uint8_t pwm_prescale = 0;     // counter advances every (pwm_prescale+1) ticks
    std::uint32_t t1 = 64;             // |dP| band edges, squared-code units
    std::uint32_t t2 = 256;
    std::uint32_t t3 = 1024;
    std::uint32_t h2 = 4;              // calm-decision limits
    std::uint32_t h3 = 8;
    std::uint8_t clamp_min = 8;
    std::uint8_t clamp_max = 248;
    // plant
    double p_max = 1.0;
    double d_star = 0.5;
    double k = 4.0;
    double v_max = 1.0;
    double v_full_scale = 1.0;
    double i_full_scale = 4.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    std::vector<IrradianceEvent> schedule{{0, 1.0}};
    // power model (uW/MHz-space coefficients, see power_model.hpp)
    double vdd = 1.2;
    double f_sys_hz = 1e6;
    double power_a = default_power_fit_uw().first;
    double power_b = default_power_fit_uw().second;
    // run
    std::uint64_t n_cycles = 100000;
    std::uint64_t decimate = 1;
    std::string trace_file = "trace.csv";
    std::string summary_file = "summary.txt";

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

    void validate() const {
        make_controller_config().validate();
        make_plant().validate();
        if (!(std::isfinite(vdd) && vdd > 0.0))
            throw ScenarioError(0, "vdd must be > 0");
        if (!(std::isfinite(f_sys_hz) && f_sys_hz >= 0.0))
            throw ScenarioError(0, "f_sys_hz must be >= 0");
        if (!(std::isfinite(power_a) && std::isfinite(power_b)))
            throw ScenarioError(0, "power coefficients must be finite");
        if (decimate == 0)
            throw ScenarioError(0, "decimate must be >= 1");
        if (trace_file.empty() || summary_file.empty())
            throw ScenarioError(0, "output file names must be non-empty");
    }

    ControllerConfig make_controller_config() const {
        ControllerConfig cfg;
        cfg.averaging = AveragingCode{averaging};
        cfg.prescale_code = pwm_prescale;
        cfg.thresholds = StepThresholds{t1, t2, t3};
        cfg.calm = CalmLimits{h2, h3};
        cfg.clamp = CompareClamp{clamp_min, clamp_max};
        return cfg;
    }

    PlantModel make_plant() const {
        PlantModel plant;
        plant.p_max = p_max;
        plant.d_star = d_star;
        plant.k = k;
        plant.v_max = v_max;
        plant.v_full_scale = v_full_scale;
        plant.i_full_scale = i_full_scale;
        plant.noise_sigma = noise_sigma;
        plant.seed = seed;
        plant.validate();
        plant.set_schedule(schedule);
        return plant;
    }

    PowerModelParams power_params() const {
        PowerModelParams p;
        p.dynamic_coeff = power_a * 1e-12;
        p.leakage_coeff = power_b * 1e-6;
        return p;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string_view v, int line, const std::string& key) {
    const std::string tmp(v);
    char* end = nullptr;
    const double x = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || tmp.empty())
        throw ScenarioError(line, key + ": malformed number '" + tmp + "'");
    return x;
}

inline std::uint64_t parse_uint(std::string_view v, int line, const std::string& key,
                                std::uint64_t max_value) {
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ScenarioError(line, key + ": malformed integer '" + std::string(v) + "'");
    if (x > max_value)
        throw ScenarioError(line, key + ": value " + std::to_string(x) + " out of range (max " +
                                      std::to_string(max_value) + ")");
    return x;
}

// "cycle:irradiance, cycle:irradiance, ..."
inline std::vector<IrradianceEvent> parse_schedule(std::string_view v, int line) {
    std::vector<IrradianceEvent> events;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t comma = v.find(',', start);
        if (comma == std::string_view::npos) comma = v.size();
        const std::string_view item = trim(v.substr(start, comma - start));
        if (!item.empty()) {
            const std::size_t colon = item.find(':');
            if (colon == std::string_view::npos)
                throw ScenarioError(line, "schedule: expected 'cycle:irradiance', got '" +
                                              std::string(item) + "'");
            IrradianceEvent ev;
            ev.cycle = parse_uint(trim(item.substr(0, colon)), line, "schedule", UINT64_MAX);
            ev.irradiance = parse_real(trim(item.substr(colon + 1)), line, "schedule");
            events.push_back(ev);
        }
        if (comma == v.size()) break;
        start = comma + 1;
    }
    if (events.empty())
        throw ScenarioError(line, "schedule: needs at least one event");
    return events;
}

inline std::string format_real(double x) {
    char buf[40];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

}  // namespace detail

inline std::string serialize_schedule(const std::vector<IrradianceEvent>& events) {
    std::string out;
    for (std::size_t j = 0; j < events.size(); ++j) {
        if (j) out += ", ";
        out += std::to_string(events[j].cycle) + ":" + detail::format_real(events[j].irradiance);
    }
    return out;
}

inline std::string serialize_scenario(const ScenarioConfig& c) {
    std::ostringstream out;
    out << "averaging = " << unsigned(c.averaging) << '\n'
        << "pwm_prescale = " << unsigned(c.pwm_prescale) << '\n'
        << "t1 = " << c.t1 << '\n'
        << "t2 = " << c.t2 << '\n'
        << "t3 = " << c.t3 << '\n'
        << "h2 = " << c.h2 << '\n'
        << "h3 = " << c.h3 << '\n'
        << "clamp_min = " << unsigned(c.clamp_min) << '\n'
        << "clamp_max = " << unsigned(c.clamp_max) << '\n'
        << "p_max = " << detail::format_real(c.p_max) << '\n'
        << "d_star = " << detail::format_real(c.d_star) << '\n'
        << "k = " << detail::format_real(c.k) << '\n'
        << "v_max = " << detail::format_real(c.v_max) << '\n'
        << "v_full_scale = " << detail::format_real(c.v_full_scale) << '\n'
        << "i_full_scale = " << detail::format_real(c.i_full_scale) << '\n'
        << "noise_sigma = " << detail::format_real(c.noise_sigma) << '\n'
        << "seed = " << c.seed << '\n'
        << "schedule = " << serialize_schedule(c.schedule) << '\n'
        << "vdd = " << detail::format_real(c.vdd) << '\n'
        << "f_sys_hz = " << detail::format_real(c.f_sys_hz) << '\n'
        << "power_a = " << detail::format_real(c.power_a) << '\n'
        << "power_b = " << detail::format_real(c.power_b) << '\n'
        << "n_cycles = " << c.n_cycles << '\n'
        << "decimate = " << c.decimate << '\n'
        << "trace_file = " << c.trace_file << '\n'
        << "summary_file = " << c.summary_file << '\n';
    return out.str();
}

inline ScenarioConfig parse_scenario(std::string_view text) {
    ScenarioConfig cfg;
    std::unordered_set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ScenarioError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ScenarioError(line_no, "missing key before '='");
        if (value.empty())
            throw ScenarioError(line_no, key + ": missing value");
        if (!seen.insert(key).second)
            throw ScenarioError(line_no, key + ": duplicate key");

        using detail::parse_real;
        using detail::parse_uint;
        auto real_in = [&](double lo, double hi, bool lo_open = false) {
            const double x = parse_real(value, line_no, key);
            const bool low_ok = lo_open ? x > lo : x >= lo;
            if (!(std::isfinite(x) && low_ok && x <= hi))
                throw ScenarioError(line_no, key + ": value " + std::string(value) + " out of range");
            return x;
        };

        if (key == "averaging") cfg.averaging = static_cast<std::uint8_t>(parse_uint(value, line_no, key, 3));
        else if (key == "pwm_prescale") cfg.pwm_prescale = static_cast<std::uint8_t>(parse_uint(value, line_no, key, 255));
        else if (key == "t1") cfg.t1 = static_cast<std::uint32_t>(parse_uint(value, line_no, key, UINT32_MAX));
        else if (key == "t2") cfg.t2 = static_cast<std::uint32_t>(parse_uint(value, line_no, key, UINT32_MAX));
        else if (key == "t3") cfg.t3 = static_cast<std::uint32_t>(parse_uint(value, line_no, key, UINT32_MAX));
        else if (key == "h2") cfg.h2 = static_cast<std::uint32_t>(parse_uint(value, line_no, key, UINT32_MAX));
        else if (key == "h3") cfg.h3 = static_cast<std::uint32_t>(parse_uint(value, line_no, key, UINT32_MAX));
        else if (key == "clamp_min") cfg.clamp_min = static_cast<std::uint8_t>(parse_uint(value, line_no, key, 255));
        else if (key == "clamp_max") cfg.clamp_max = static_cast<std::uint8_t>(parse_uint(value, line_no, key, 255));
        else if (key == "p_max") cfg.p_max = real_in(0.0, 1e12, true);
        else if (key == "d_star") {
            const double x = parse_real(value, line_no, key);
            if (!(std::isfinite(x) && x > 0.0 && x < 1.0))
                throw ScenarioError(line_no, key + ": value " + std::string(value) + " out of range (0, 1)");
            cfg.d_star = x;
        }
        else if (key == "k") cfg.k = real_in(0.0, 1e12, true);
        else if (key == "v_max") cfg.v_max = real_in(0.0, 1e12, true);
        else if (key == "v_full_scale") cfg.v_full_scale = real_in(0.0, 1e12, true);
        else if (key == "i_full_scale") cfg.i_full_scale = real_in(0.0, 1e12, true);
        else if (key == "noise_sigma") cfg.noise_sigma = real_in(0.0, 1e6);
        else if (key == "seed") cfg.seed = parse_uint(value, line_no, key, UINT64_MAX);
        else if (key == "schedule") cfg.schedule = detail::parse_schedule(value, line_no);
        else if (key == "vdd") cfg.vdd = real_in(0.0, 1e6, true);
        else if (key == "f_sys_hz") cfg.f_sys_hz = real_in(0.0, 1e15);
        else if (key == "power_a") cfg.power_a = parse_real(value, line_no, key);
        else if (key == "power_b") cfg.power_b = parse_real(value, line_no, key);
        else if (key == "n_cycles") cfg.n_cycles = parse_uint(value, line_no, key, UINT64_MAX);
        else if (key == "decimate") cfg.decimate = parse_uint(value, line_no, key, UINT64_MAX);
        else if (key == "trace_file") cfg.trace_file = std::string(value);
        else if (key == "summary_file") cfg.summary_file = std::string(value);
        else throw ScenarioError(line_no, "unknown key '" + key + "'");

        if (eol == text.size()) break;
    }

    try {
        cfg.validate();
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(0, e.what());
    }
    return cfg;
}

}  // namespace mpptsim
