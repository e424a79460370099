#pragma once

#include <span>
#include <vector>

#include "rsf/imaging.hpp"

namespace rsf {

/// |DFT| of `signal` zero-padded (or truncated) to `length` points.
std::vector<double> fft_magnitude(std::span<const double> signal, int length);

/// |2D DFT| of a plane, same dimensions, DC at (0,0).
Plane fft2_magnitude(const Plane& plane);

}  // namespace rsf
