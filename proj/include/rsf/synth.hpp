#pragma once

#include <cstdint>

#include "rsf/imaging.hpp"

namespace rsf {

/// Procedural stand-in for a raw camera image: multi-scale Gaussian-filtered
/// noise backgrounds, anti-aliased shapes with their own fine texture, and
/// white sensor noise, quantized to 8 bits. Contains no resampling traces.
ImageBuffer synthesize_raw_image(int width, int height, std::uint64_t seed);

}  // namespace rsf
