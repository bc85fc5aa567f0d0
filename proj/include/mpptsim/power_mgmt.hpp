#pragma once
// Power management block: decodes 2-bit clock requests into divide
// ratios and turns the system clock into a tracker enable strobe.
// Divided clocks are modelled as enables in the one master clock
// domain; the cycle behavior is the same as separate divided clocks.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "tracking.hpp"

namespace mpptsim {

inline constexpr std::array<std::uint32_t, 4> kDividerRatios{2, 20, 200, 2000};

inline std::uint32_t decode_request(ClockRequestCode c) {
    if (c.code >= kDividerRatios.size())
        throw std::domain_error("decode_request: code out of range");
    return kDividerRatios[c.code];
}

inline ClockRequestCode encode_request(std::uint32_t ratio) {
    for (std::uint8_t i = 0; i < kDividerRatios.size(); ++i)
        if (kDividerRatios[i] == ratio) return ClockRequestCode{i};
    throw std::domain_error("encode_request: not a divider ratio");
}

class ClockDivider {
public:
    ClockDivider() = default;

    // Record a request; it takes effect at the next strobe boundary so
    // no enable interval is ever cut short. A later request within the
    // same interval overwrites the earlier one.
    void submit(ClockRequestCode c) { pending_ = decode_request(c); }

    // One system-clock edge. The strobe fires when the counter sits at
    // the wrap position; a pending ratio is taken over on that edge.
    // From reset the first edge strobes, then every active_ratio edges.
    bool tick() {
        const bool enable = counter_ == 0;
        if (enable && pending_) {
            active_ = *pending_;
            pending_.reset();
        }
        counter_ = (counter_ + 1) % active_;
        return enable;
    }

    std::uint32_t active_ratio() const { return active_; }
    std::uint32_t cycle_counter() const { return counter_; }
    bool has_pending() const { return pending_.has_value(); }

private:
    std::uint32_t active_ = 2;    // fastest ratio at reset
    std::optional<std::uint32_t> pending_;
    std::uint32_t counter_ = 0;
};

}  // namespace mpptsim
