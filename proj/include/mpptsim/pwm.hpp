#pragma once
// PWM output stage: a free-running 8-bit counter compared against a
// latched compare value. Output is high while counter < compare.
// Compare updates are buffered and taken over only on counter
// overflow, so the output period never changes mid-flight. An 8-bit
// prescaler sets the static output frequency: the counter advances
// once every (prescale_code + 1) system clock ticks.

#include <cstdint>
#include <optional>

#include "signals.hpp"

namespace mpptsim {

// Duty cycle in percent over one full 256-count period: the output is
// high for exactly `compare` of the 256 counter steps.
inline double duty_cycle_percent(CompareValue c) {
    return static_cast<double>(c.value) / 256.0 * 100.0;
}

// Duty as a plain ratio; what the averaged converter output sees.
constexpr double duty_ratio(CompareValue c) noexcept { return c.value / 256.0; }

class PwmGenerator {
public:
    explicit PwmGenerator(std::uint8_t prescale_code = 0,
                          CompareValue initial_compare = CompareValue{128})
        : compare_active_(initial_compare), prescale_code_(prescale_code) {
        output_ = counter_ < compare_active_.value;
    }

    // Buffer a new compare value; the active one is replaced only when
    // the counter overflows from 255 to 0. Last writer wins.
    void load_compare(CompareValue v) { compare_pending_ = v; }

    // One system-clock edge. Returns the output bit.
    bool tick() {
        if (prescale_counter_ == prescale_code_) {
            prescale_counter_ = 0;
            if (counter_ == 255) {
                counter_ = 0;
                if (compare_pending_) {
                    compare_active_ = *compare_pending_;
                    compare_pending_.reset();
                }
            } else {
                ++counter_;
            }
        } else {
            ++prescale_counter_;
        }
        output_ = counter_ < compare_active_.value;
        return output_;
    }

    std::uint8_t counter() const { return counter_; }
    CompareValue compare_active() const { return compare_active_; }
    bool has_pending() const { return compare_pending_.has_value(); }
    std::uint8_t prescale_code() const { return prescale_code_; }
    bool output() const { return output_; }

    // Full output period in system clock ticks; constant by design.
    std::uint32_t period_ticks() const {
        return 256u * (static_cast<std::uint32_t>(prescale_code_) + 1u);
    }

private:
    std::uint8_t counter_ = 0;
    CompareValue compare_active_{128};
    std::optional<CompareValue> compare_pending_;
    std::uint8_t prescale_code_ = 0;
    std::uint8_t prescale_counter_ = 0;
    bool output_ = true;
};

}  // namespace mpptsim
