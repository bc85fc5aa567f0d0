#pragma once
// Synchronous composition of divider, tracker and PWM stage with a
// fixed evaluation order per clock edge:
//   1. the divider produces the tracker enable strobe,
//   2. on a strobe the plant is sampled at the commanded duty and the
//      tracker may decide (routing a new compare to the PWM buffer and
//      a clock request to the divider),
//   3. the PWM stage ticks,
//   4. one TraceRecord is emitted.
// A request submitted by a decision therefore takes effect no earlier
// than the next edge, like a registered request/response handshake.

#include <cstdint>
#include <optional>
#include <vector>

#include "plant.hpp"
#include "power_mgmt.hpp"
#include "pwm.hpp"
#include "signals.hpp"
#include "tracking.hpp"

namespace mpptsim {

struct ControllerConfig {
    AveragingCode averaging{};
    std::uint8_t prescale_code = 0;
    StepThresholds thresholds{};
    CalmLimits calm{};
    CompareClamp clamp{};

    void validate() const {
        TrackerConfig{averaging, thresholds, calm, clamp}.validate();
    }
};

// One row per system clock cycle; fields echo the post-edge state.
struct TraceRecord {
    std::uint64_t cycle = 0;
    std::uint8_t v_code = 0;                 // last sampled codes (0 until first sample)
    std::uint8_t i_code = 0;
    std::uint16_t p_inst = 0;
    std::optional<std::uint16_t> p_avg;      // present on decision cycles only
    std::uint8_t compare = 128;              // active PWM compare value
    std::uint8_t step = 0;                   // last decision's step (0 until first)
    std::int8_t direction = 1;
    std::uint8_t clock_request = 0;          // last emitted request code
    std::uint32_t active_ratio = 2;
    bool pwm_out = false;
    double duty = 0.5;                       // compare / 256

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class Controller {
public:
    explicit Controller(const ControllerConfig& cfg)
        : tracker_(TrackerConfig{cfg.averaging, cfg.thresholds, cfg.calm, cfg.clamp}),
          pwm_(cfg.prescale_code) {}

    TraceRecord step(const PlantModel& plant) {
        const bool enable = divider_.tick();
        std::optional<std::uint16_t> p_avg;
        if (enable) {
            const double duty = duty_ratio(pwm_.compare_active());
            const PlantOutputs out = plant.outputs(duty, cycle_);
            last_v_ = quantize_adc(out.v, plant.v_full_scale);
            last_i_ = quantize_adc(out.i, plant.i_full_scale);
            if (auto avg = tracker_.accumulate(last_v_, last_i_)) {
                const TrackerDecision d = tracker_.update(avg->first, avg->second);
                pwm_.load_compare(d.compare);
                divider_.submit(d.clock_request);
                p_avg = tracker_.prev_power();
                last_step_ = d.step;
                last_request_ = d.clock_request.code;
            }
        }
        pwm_.tick();

        TraceRecord rec;
        rec.cycle = cycle_;
        rec.v_code = last_v_.code;
        rec.i_code = last_i_.code;
        rec.p_inst = instant_power(last_v_, last_i_).value;
        rec.p_avg = p_avg;
        rec.compare = pwm_.compare_active().value;
        rec.step = last_step_;
        rec.direction = static_cast<std::int8_t>(sign(tracker_.direction()));
        rec.clock_request = last_request_;
        rec.active_ratio = divider_.active_ratio();
        rec.pwm_out = pwm_.output();
        rec.duty = duty_ratio(pwm_.compare_active());
        ++cycle_;
        return rec;
    }

    template <typename Sink>
    void run(const PlantModel& plant, std::uint64_t n_cycles, Sink&& sink) {
        for (std::uint64_t n = 0; n < n_cycles; ++n) sink(step(plant));
    }

    std::vector<TraceRecord> run(const PlantModel& plant, std::uint64_t n_cycles) {
        std::vector<TraceRecord> trace;
        trace.reserve(n_cycles);
        run(plant, n_cycles, [&](const TraceRecord& r) { trace.push_back(r); });
        return trace;
    }

    std::uint64_t cycle() const { return cycle_; }
    const Tracker& tracker() const { return tracker_; }
    const ClockDivider& divider() const { return divider_; }
    const PwmGenerator& pwm() const { return pwm_; }

private:
    Tracker tracker_;
    ClockDivider divider_;
    PwmGenerator pwm_;
    std::uint64_t cycle_ = 0;
    AdcCode last_v_{};
    AdcCode last_i_{};
    std::uint8_t last_step_ = 0;
    std::uint8_t last_request_ = 0;
};

}  // namespace mpptsim
