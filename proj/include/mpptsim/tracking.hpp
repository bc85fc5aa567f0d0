#pragma once
// Tracking block: windowed averaging of the input samples, perturb &
// observe with a banded variable step, and the clock-speed request
// derived from the magnitude of the power change.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "signals.hpp"

namespace mpptsim {

// 2-bit encoded averaging window. The bus code conceals the sample
// count; ascending codes select ascending windows {1, 8, 32, 64}.
struct AveragingCode {
    std::uint8_t code = 0;
    friend auto operator<=>(const AveragingCode&, const AveragingCode&) = default;
};

inline unsigned decode_averaging(AveragingCode c) {
    switch (c.code) {
        case 0: return 1;
        case 1: return 8;
        case 2: return 32;
        case 3: return 64;
        default: throw std::domain_error("decode_averaging: code out of range");
    }
}

// 2-bit clock request bus. Same custom-code idea as Averaging:
// ascending codes select ascending divide ratios {2, 20, 200, 2000}.
struct ClockRequestCode {
    std::uint8_t code = 0;
    friend auto operator<=>(const ClockRequestCode&, const ClockRequestCode&) = default;
};

enum class Direction : std::int8_t { down = -1, up = +1 };

constexpr int sign(Direction d) noexcept { return static_cast<int>(d); }
constexpr Direction reversed(Direction d) noexcept {
    return d == Direction::up ? Direction::down : Direction::up;
}

// |dP| band edges shared by the step rule and the clock request rule,
// in squared-code units.
struct StepThresholds {
    std::uint32_t t1 = 64;
    std::uint32_t t2 = 256;
    std::uint32_t t3 = 1024;
};

// Consecutive calm decisions (|dP| < t1) before the slowest clock is
// requested; hysteresis against noise-driven divider flapping.
struct CalmLimits {
    std::uint32_t h2 = 4;
    std::uint32_t h3 = 8;
};

// The compare output is pinned inside [lo, hi]; 0 % or 100 % duty
// would stall a real converter stage.
struct CompareClamp {
    std::uint8_t lo = 8;
    std::uint8_t hi = 248;
};

struct TrackerConfig {
    AveragingCode averaging{};
    StepThresholds thresholds{};
    CalmLimits calm{};
    CompareClamp clamp{};

    void validate() const {
        if (averaging.code > 3)
            throw std::invalid_argument("tracker config: averaging code out of range");
        if (!(thresholds.t1 < thresholds.t2 && thresholds.t2 < thresholds.t3))
            throw std::invalid_argument("tracker config: thresholds must be ascending");
        if (thresholds.t1 == 0)
            throw std::invalid_argument("tracker config: t1 must be >= 1");
        if (!(calm.h2 < calm.h3))
            throw std::invalid_argument("tracker config: calm limits must be ascending");
        if (calm.h2 == 0)
            throw std::invalid_argument("tracker config: h2 must be >= 1");
        if (!(clamp.lo <= 128 && 128 <= clamp.hi))
            throw std::invalid_argument("tracker config: clamp range must contain the reset compare 128");
    }
};

// One perturb & observe outcome.
struct TrackerDecision {
    CompareValue compare{};
    ClockRequestCode clock_request{};
    std::int32_t delta_p = 0;
    std::uint8_t step = 0;
};

// Banded step size: larger power changes perturb harder.
inline std::uint8_t perturb_step(std::uint32_t delta_p_abs, const StepThresholds& t) {
    if (delta_p_abs < t.t1) return 1;
    if (delta_p_abs < t.t2) return 2;
    if (delta_p_abs < t.t3) return 4;
    return 8;
}

// Hill climbing rule: keep going while power rises, turn around when
// it falls. A tie keeps the current direction.
constexpr Direction po_decide(std::int32_t delta_p, Direction current) noexcept {
    return delta_p < 0 ? reversed(current) : current;
}

class Tracker {
public:
    explicit Tracker(const TrackerConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        window_ = decode_averaging(cfg_.averaging);
    }

    // Feed one sample pair. Returns the rounded window averages when
    // the window fills (and resets the accumulators), nothing before.
    std::optional<std::pair<AdcCode, AdcCode>> accumulate(AdcCode v, AdcCode i) {
        v_accum_ += v.code;
        i_accum_ += i.code;
        if (++sample_count_ < window_) return std::nullopt;
        const auto avg_v = static_cast<std::uint8_t>((v_accum_ + window_ / 2) / window_);
        const auto avg_i = static_cast<std::uint8_t>((i_accum_ + window_ / 2) / window_);
        v_accum_ = i_accum_ = 0;
        sample_count_ = 0;
        return std::make_pair(AdcCode{avg_v}, AdcCode{avg_i});
    }

    // One P&O decision from an averaged sample pair: update direction,
    // pick the step, move the compare output, request a clock speed.
    TrackerDecision update(AdcCode avg_v, AdcCode avg_i) {
        const PowerValue p = instant_power(avg_v, avg_i);
        const std::int32_t delta = static_cast<std::int32_t>(p.value) - static_cast<std::int32_t>(prev_power_);
        const auto mag = static_cast<std::uint32_t>(delta < 0 ? -delta : delta);
        direction_ = po_decide(delta, direction_);
        const std::uint8_t step = perturb_step(mag, cfg_.thresholds);
        int next = static_cast<int>(compare_) + sign(direction_) * step;
        next = std::clamp(next, static_cast<int>(cfg_.clamp.lo), static_cast<int>(cfg_.clamp.hi));
        compare_ = static_cast<std::uint8_t>(next);
        const ClockRequestCode request = clock_request(mag);
        prev_power_ = p.value;
        return TrackerDecision{CompareValue{compare_}, request, delta, step};
    }

    // Map the power-change magnitude to a divider request. Loud bands
    // ask for a fast clock directly; the calm band counts consecutive
    // calm decisions and only drops to the slowest clock after h3.
    ClockRequestCode clock_request(std::uint32_t delta_p_abs) {
        const auto& t = cfg_.thresholds;
        if (delta_p_abs >= t.t3) { calm_count_ = 0; return ClockRequestCode{0}; }   // ratio 2
        if (delta_p_abs >= t.t2) { calm_count_ = 0; return ClockRequestCode{1}; }   // ratio 20
        if (delta_p_abs >= t.t1) { calm_count_ = 0; return ClockRequestCode{2}; }   // ratio 200
        ++calm_count_;
        return ClockRequestCode{static_cast<std::uint8_t>(calm_count_ >= cfg_.calm.h3 ? 3 : 2)};
    }

    // Changing the window mid-run discards the partial window.
    void set_averaging(AveragingCode code) {
        window_ = decode_averaging(code);
        cfg_.averaging = code;
        v_accum_ = i_accum_ = 0;
        sample_count_ = 0;
    }

    std::uint8_t compare() const { return compare_; }
    Direction direction() const { return direction_; }
    std::uint16_t prev_power() const { return prev_power_; }
    unsigned window() const { return window_; }
    unsigned sample_count() const { return sample_count_; }
    std::uint32_t calm_count() const { return calm_count_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    TrackerConfig cfg_;
    unsigned window_ = 1;
    std::uint32_t v_accum_ = 0;
    std::uint32_t i_accum_ = 0;
    unsigned sample_count_ = 0;
    std::uint16_t prev_power_ = 0;    // first decision sees dP >= 0
    Direction direction_ = Direction::up;
    std::uint8_t compare_ = 128;      // 50 % duty at reset
    std::uint32_t calm_count_ = 0;
};

}  // namespace mpptsim
