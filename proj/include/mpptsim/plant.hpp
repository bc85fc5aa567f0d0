#pragma once
// Parametric stand-in for the harvester plus converter: a concave
// power hill over duty ratio with a schedulable irradiance scale,
// optional multiplicative sample noise, and an exhaustive search for
// the best compare code used as the reference by tests and metrics.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "signals.hpp"

namespace mpptsim {
namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform in (0, 1]; never returns 0 so log() below stays finite.
inline double unit_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// One standard normal keyed on (seed, cycle, channel). Stateless, so
// the noise stream is reproducible in any evaluation order.
inline double keyed_normal(std::uint64_t seed, std::uint64_t cycle, std::uint32_t channel) {
    std::uint64_t s = seed;
    s ^= 0x9E3779B97F4A7C15ull * (cycle + 0x632BE59BD9B4E019ull);
    s ^= 0xC2B2AE3D27D4EB4Full * (static_cast<std::uint64_t>(channel) + 1u);
    const double u1 = unit_open(splitmix64(s));
    const double u2 = unit_open(splitmix64(s));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace detail

struct IrradianceEvent {
    std::uint64_t cycle = 0;
    double irradiance = 1.0;
    friend bool operator==(const IrradianceEvent&, const IrradianceEvent&) = default;
};

struct PlantOutputs {
    double v = 0.0;
    double i = 0.0;
};

class PlantModel {
public:
    double p_max = 1.0;          // peak extractable power at irradiance 1, watts
    double d_star = 0.5;         // duty ratio of the true maximum power point
    double k = 4.0;              // curvature of the power hill
    double v_max = 1.0;          // near-open-circuit voltage, volts
    double v_full_scale = 1.0;   // ADC reference of the voltage channel, volts
    double i_full_scale = 4.0;   // ADC reference of the current channel, amps
    double noise_sigma = 0.0;    // relative Gaussian noise std on v and i
    std::uint64_t seed = 1;

    PlantModel() = default;

    void validate() const {
        if (!(std::isfinite(p_max) && p_max > 0.0))
            throw std::invalid_argument("plant: p_max must be > 0");
        if (!(std::isfinite(d_star) && d_star > 0.0 && d_star < 1.0))
            throw std::invalid_argument("plant: d_star must lie in (0, 1)");
        if (!(std::isfinite(k) && k > 0.0))
            throw std::invalid_argument("plant: k must be > 0");
        if (!(std::isfinite(v_max) && v_max > 0.0))
            throw std::invalid_argument("plant: v_max must be > 0");
        if (!(std::isfinite(v_full_scale) && v_full_scale > 0.0))
            throw std::invalid_argument("plant: v_full_scale must be > 0");
        if (!(std::isfinite(i_full_scale) && i_full_scale > 0.0))
            throw std::invalid_argument("plant: i_full_scale must be > 0");
        if (!(std::isfinite(noise_sigma) && noise_sigma >= 0.0))
            throw std::invalid_argument("plant: noise_sigma must be >= 0");
    }

    // Replace the irradiance schedule. Events are left-closed steps and
    // must come in strictly increasing cycle order.
    void set_schedule(std::vector<IrradianceEvent> events) {
        if (events.empty())
            throw std::invalid_argument("plant: schedule needs at least one event");
        for (std::size_t j = 0; j < events.size(); ++j) {
            if (!(std::isfinite(events[j].irradiance) && events[j].irradiance >= 0.0))
                throw std::invalid_argument("plant: irradiance must be >= 0");
            if (j > 0 && events[j].cycle <= events[j - 1].cycle)
                throw std::invalid_argument("plant: schedule cycles must be strictly increasing");
        }
        schedule_ = std::move(events);
    }

    const std::vector<IrradianceEvent>& schedule() const { return schedule_; }

    // Piecewise-constant, left-closed lookup. Cycles before the first
    // event take the first event's value.
    double irradiance_at(std::uint64_t cycle) const {
        double out = schedule_.front().irradiance;
        for (const auto& ev : schedule_) {
            if (ev.cycle <= cycle)
                out = ev.irradiance;
            else
                break;
        }
        return out;
    }

    // Noise-free hill power at a given irradiance scale.
    double ideal_power(double duty, double irradiance) const {
        const double off = duty - d_star;
        return p_max * irradiance * std::max(0.0, 1.0 - k * off * off);
    }

    double ideal_power_at(double duty, std::uint64_t cycle) const {
        return ideal_power(duty, irradiance_at(cycle));
    }

    // Terminal observations for a commanded duty ratio. Noise is
    // multiplicative and independent per channel per cycle.
    PlantOutputs outputs(double duty, std::uint64_t cycle) const {
        if (!(duty >= 0.0 && duty <= 1.0))
            throw std::domain_error("plant: duty outside [0, 1]");
        auto [v, i] = ideal_outputs(duty, irradiance_at(cycle));
        if (noise_sigma > 0.0) {
            v *= 1.0 + noise_sigma * detail::keyed_normal(seed, cycle, 0);
            i *= 1.0 + noise_sigma * detail::keyed_normal(seed, cycle, 1);
            v = std::max(v, 0.0);
            i = std::max(i, 0.0);
        }
        return {v, i};
    }

    // Exhaustive search over all 256 compare codes for the one that
    // maximizes the quantized code-domain power, noise-free. Ties go
    // to the lower code.
    CompareValue oracle_mpp(std::uint64_t cycle) const {
        const double s = irradiance_at(cycle);
        unsigned best_code = 0;
        std::uint32_t best_power = 0;
        for (unsigned code = 0; code < 256; ++code) {
            const auto [v, i] = ideal_outputs(code / 256.0, s);
            const PowerValue p = instant_power(quantize_adc(v, v_full_scale),
                                               quantize_adc(i, i_full_scale));
            if (p.value > best_power) {
                best_power = p.value;
                best_code = code;
            }
        }
        return CompareValue{static_cast<std::uint8_t>(best_code)};
    }

private:
    std::pair<double, double> ideal_outputs(double duty, double irradiance) const {
        const double p = ideal_power(duty, irradiance);
        // 1 % voltage floor keeps i = p / v bounded near 100 % duty.
        const double v = std::max(v_max * (1.0 - duty), 0.01 * v_max);
        return {v, p / v};
    }

    std::vector<IrradianceEvent> schedule_{{0, 1.0}};
};

}  // namespace mpptsim
