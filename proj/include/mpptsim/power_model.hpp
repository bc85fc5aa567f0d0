#pragma once
// Controller self-power estimation: the classic alpha*C_L*V^2*f
// switching term plus a linear leakage term. Coefficients are fitted
// per process corner and temperature to measured uW/MHz samples and
// applied to the clock-gating activity seen in a simulation trace.

#include <cmath>
#include <cstdint>
#include <istream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpptsim {

enum class Corner { SS, TT, FF };

inline const char* corner_name(Corner c) {
    switch (c) {
        case Corner::SS: return "SS";
        case Corner::TT: return "TT";
        case Corner::FF: return "FF";
    }
    return "?";
}

inline Corner parse_corner(const std::string& s) {
    if (s == "SS") return Corner::SS;
    if (s == "TT") return Corner::TT;
    if (s == "FF") return Corner::FF;
    throw std::invalid_argument("unknown process corner: " + s);
}

struct PowerModelParams {
    double dynamic_coeff = 0.0;   // lumped switching coefficient, W / (V^2 Hz)
    double leakage_coeff = 0.0;   // leakage slope, W / V (frequency independent)
    Corner corner = Corner::TT;
    double temperature_c = 27.0;
};

// Fraction of system clock cycles each sub-block actually toggles.
struct ActivityProfile {
    double f_sys_hz = 1e6;
    double pwm_weight = 1.0;
    double tracker_weight = 0.5;
};

// Switching power of a clocked block: coeff * V^2 * f.
inline double dynamic_power(double alpha_cl, double v, double f) {
    if (alpha_cl < 0.0 || v < 0.0 || f < 0.0)
        throw std::domain_error("dynamic_power: negative input");
    return alpha_cl * v * v * f;
}

struct VoltagePowerSample {
    double v_dd = 0.0;               // volts
    double p_avg_uw_per_mhz = 0.0;   // measured at 1 MHz
};

// Least-squares fit of p = A v^2 + B v in uW/MHz space. Residuals are
// taken relative to each sample so cells spanning decades fit evenly;
// B can come out negative when the measured spread grows faster than
// v^2, which the 27 uW/MHz table cells routinely do.
inline PowerModelParams calibrate(std::span<const VoltagePowerSample> samples,
                                  Corner corner = Corner::TT,
                                  double temperature_c = 27.0) {
    if (samples.size() < 2)
        throw std::invalid_argument("calibrate: need at least 2 samples");
    bool distinct = false;
    for (std::size_t j = 1; j < samples.size(); ++j)
        distinct |= samples[j].v_dd != samples[0].v_dd;
    if (!distinct)
        throw std::invalid_argument("calibrate: need at least 2 distinct voltages");

    double sxx = 0, sxy = 0, syy = 0, sxt = 0, syt = 0;
    for (const auto& s : samples) {
        if (!(std::isfinite(s.v_dd) && s.v_dd > 0.0))
            throw std::invalid_argument("calibrate: v_dd must be > 0");
        if (!(std::isfinite(s.p_avg_uw_per_mhz) && s.p_avg_uw_per_mhz > 0.0))
            throw std::invalid_argument("calibrate: power samples must be > 0");
        const double x = s.v_dd * s.v_dd / s.p_avg_uw_per_mhz;
        const double y = s.v_dd / s.p_avg_uw_per_mhz;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxt += x;
        syt += y;
    }
    const double det = sxx * syy - sxy * sxy;
    if (!(std::abs(det) > 0.0))
        throw std::invalid_argument("calibrate: degenerate sample set");
    const double a_uw_mhz = (sxt * syy - sxy * syt) / det;
    const double b_uw = (sxx * syt - sxy * sxt) / det;

    PowerModelParams out;
    out.dynamic_coeff = a_uw_mhz * 1e-12;   // uW/MHz = 1e-6 W / 1e6 Hz
    out.leakage_coeff = b_uw * 1e-6;
    out.corner = corner;
    out.temperature_c = temperature_c;
    return out;
}

// Model power in watts for a given supply and activity: the gated
// blocks contribute switching power in proportion to their enable
// fraction, leakage burns regardless of the clock.
inline double estimate(const PowerModelParams& p, const ActivityProfile& a, double v) {
    return p.dynamic_coeff * v * v * a.f_sys_hz * (a.pwm_weight + a.tracker_weight) +
           p.leakage_coeff * v;
}

inline double reduction_percent(double p_ref, double p_low) {
    if (!(p_ref > 0.0))
        throw std::domain_error("reduction_percent: reference must be > 0");
    return (1.0 - p_low / p_ref) * 100.0;
}

// One cell of the measured-power table.
struct PowerTableRow {
    double v_dd = 0.0;
    Corner corner = Corner::TT;
    double temp_c = 27.0;
    double p_avg_uw_per_mhz = 0.0;
};

// Plain tabular text: "v_dd corner temp_c p_avg_uw_per_mhz" per line,
// '#' starts a comment.
inline std::vector<PowerTableRow> parse_power_table(std::istream& in) {
    std::vector<PowerTableRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        double v_dd = 0, temp = 0, p = 0;
        std::string corner;
        if (!(fields >> v_dd)) continue;   // blank or comment-only line
        if (!(fields >> corner >> temp >> p))
            throw std::invalid_argument("power table line " + std::to_string(line_no) +
                                        ": expected 'v_dd corner temp_c p_avg'");
        rows.push_back({v_dd, parse_corner(corner), temp, p});
    }
    return rows;
}

inline std::vector<VoltagePowerSample> select_samples(std::span<const PowerTableRow> rows,
                                                      Corner corner, double temp_c) {
    std::vector<VoltagePowerSample> out;
    for (const auto& r : rows)
        if (r.corner == corner && r.temp_c == temp_c)
            out.push_back({r.v_dd, r.p_avg_uw_per_mhz});
    return out;
}

}  // namespace mpptsim
