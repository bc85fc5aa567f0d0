#pragma once
// 8-bit signal codes shared by all blocks of the controller, the ADC
// front-end quantizer, and the code-domain instantaneous power product.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>

namespace mpptsim {

// One 8-bit sample of the voltage or current channel.
struct AdcCode {
    std::uint8_t code = 0;
    friend auto operator<=>(const AdcCode&, const AdcCode&) = default;
};

// Product of two AdcCodes; at most 255 * 255 = 65025, fits in 16 bits.
struct PowerValue {
    std::uint16_t value = 0;
    friend auto operator<=>(const PowerValue&, const PowerValue&) = default;
};

// Threshold fed to the PWM comparator; sets the output duty cycle.
struct CompareValue {
    std::uint8_t value = 0;
    friend auto operator<=>(const CompareValue&, const CompareValue&) = default;
};

// Uniform 8-bit quantizer, round-to-nearest with saturation at both
// rails. x is clamped to [0, full_scale] before scaling.
inline AdcCode quantize_adc(double x, double full_scale) {
    if (!std::isfinite(x) || !std::isfinite(full_scale))
        throw std::domain_error("quantize_adc: non-finite input");
    if (full_scale <= 0.0)
        throw std::domain_error("quantize_adc: full_scale must be > 0");
    const double clamped = std::clamp(x, 0.0, full_scale);
    const long code = std::lround(clamped / full_scale * 255.0);
    return AdcCode{static_cast<std::uint8_t>(code)};
}

// Code-domain power: plain product of the two sample codes.
constexpr PowerValue instant_power(AdcCode v, AdcCode i) noexcept {
    return PowerValue{static_cast<std::uint16_t>(v.code * i.code)};
}

}  // namespace mpptsim
