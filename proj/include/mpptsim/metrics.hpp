#pragma once
// Run metrics computed from a trace: convergence against the plant
// MPP search, tracking efficiency against the noise-free plant, the
// steady-state compare band, and the model-estimated controller power
// under the observed clock gating.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "controller.hpp"
#include "plant.hpp"
#include "power_model.hpp"
#include "scenario.hpp"

namespace mpptsim {

// A decision counts as converged once it sits within this many codes
// of the MPP search result, sustained for the full streak.
inline constexpr int kConvergenceBandCodes = 2;
inline constexpr int kConvergenceStreak = 16;
inline constexpr int kSteadyStateWindow = 32;

struct RunSummary {
    bool converged = false;
    std::int64_t convergence_decisions = -1;   // -1 when never converged
    double tracking_efficiency = std::numeric_limits<double>::quiet_NaN();
    std::uint32_t final_ratio = 2;
    double mean_estimated_controller_power = std::numeric_limits<double>::quiet_NaN();  // watts
    std::uint32_t steady_state_band = 0;       // max-min compare, last 32 decisions
};

// Streaming accumulator so metrics cost O(decisions) memory even on
// very long runs. Feeding every retained record of a run and calling
// finish() is exactly compute_metrics().
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(const ScenarioConfig& cfg)
        : plant_(cfg.make_plant()),
          params_(cfg.power_params()),
          vdd_(cfg.vdd),
          f_sys_hz_(cfg.f_sys_hz),
          pwm_weight_(1.0 / (static_cast<double>(cfg.pwm_prescale) + 1.0)) {
        plant_.noise_sigma = 0.0;   // efficiency is judged against the clean plant
        for (const auto& ev : plant_.schedule())
            oracle_codes_.push_back(plant_.oracle_mpp(ev.cycle).value);
        best_power_code_ = best_ideal_code();
    }

    void add(const TraceRecord& rec) {
        ++n_records_;
        final_ratio_ = rec.active_ratio;

        const double s = plant_.irradiance_at(rec.cycle);
        efficiency_num_ += plant_.ideal_power(rec.duty, s);
        efficiency_den_ += plant_.ideal_power(best_power_code_ / 256.0, s);

        const ActivityProfile profile{f_sys_hz_, pwm_weight_, 1.0 / rec.active_ratio};
        power_sum_ += estimate(params_, profile, vdd_);

        if (rec.p_avg) {
            const int oracle = oracle_at(rec.cycle);
            if (std::abs(static_cast<int>(rec.compare) - oracle) <= kConvergenceBandCodes) {
                ++streak_;
                if (streak_ >= kConvergenceStreak && convergence_ < 0)
                    convergence_ = static_cast<std::int64_t>(decision_count_) - kConvergenceStreak + 1;
            } else {
                streak_ = 0;
            }
            last_compares_[decision_count_ % kSteadyStateWindow] = rec.compare;
            ++decision_count_;
        }
    }

    RunSummary finish() const {
        RunSummary out;
        out.converged = convergence_ >= 0;
        out.convergence_decisions = convergence_;
        out.final_ratio = final_ratio_;
        if (n_records_ > 0) {
            out.mean_estimated_controller_power = power_sum_ / static_cast<double>(n_records_);
            if (efficiency_den_ > 0.0)
                out.tracking_efficiency = efficiency_num_ / efficiency_den_;
        }
        if (decision_count_ > 0) {
            const std::uint64_t n = decision_count_ < kSteadyStateWindow
                                        ? decision_count_
                                        : kSteadyStateWindow;
            std::uint8_t lo = 255, hi = 0;
            for (std::uint64_t j = 0; j < n; ++j) {
                lo = std::min(lo, last_compares_[j]);
                hi = std::max(hi, last_compares_[j]);
            }
            out.steady_state_band = static_cast<std::uint32_t>(hi - lo);
        }
        return out;
    }

    std::uint64_t decision_count() const { return decision_count_; }

private:
    int oracle_at(std::uint64_t cycle) const {
        std::size_t idx = 0;
        const auto& sched = plant_.schedule();
        for (std::size_t j = 0; j < sched.size(); ++j) {
            if (sched[j].cycle <= cycle)
                idx = j;
            else
                break;
        }
        return oracle_codes_[idx];
    }

    // The best commandable duty on the noise-free hill; irradiance only
    // scales the hill, so one code serves every schedule segment.
    std::uint8_t best_ideal_code() const {
        unsigned best = 0;
        double best_p = -1.0;
        for (unsigned code = 0; code < 256; ++code) {
            const double p = plant_.ideal_power(code / 256.0, 1.0);
            if (p > best_p) {
                best_p = p;
                best = code;
            }
        }
        return static_cast<std::uint8_t>(best);
    }

    PlantModel plant_;
    PowerModelParams params_;
    double vdd_;
    double f_sys_hz_;
    double pwm_weight_;
    std::vector<std::uint8_t> oracle_codes_;
    std::uint8_t best_power_code_ = 128;

    std::uint64_t n_records_ = 0;
    std::uint64_t decision_count_ = 0;
    int streak_ = 0;
    std::int64_t convergence_ = -1;
    double efficiency_num_ = 0.0;
    double efficiency_den_ = 0.0;
    double power_sum_ = 0.0;
    std::uint32_t final_ratio_ = 2;
    std::array<std::uint8_t, kSteadyStateWindow> last_compares_{};
};

inline RunSummary compute_metrics(std::span<const TraceRecord> trace, const ScenarioConfig& cfg) {
    MetricsAccumulator acc(cfg);
    for (const auto& rec : trace) acc.add(rec);
    return acc.finish();
}

}  // namespace mpptsim
