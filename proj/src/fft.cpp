#include "rsf/fft.hpp"

#include <cmath>

#include <opencv2/core.hpp>

#include "rsf/errors.hpp"

namespace rsf {

std::vector<double> fft_magnitude(std::span<const double> signal, int length) {
  if (length < 1) throw ParameterError("FFT length must be positive");
  cv::Mat in = cv::Mat::zeros(1, length, CV_64F);
  const int n = std::min<int>(length, static_cast<int>(signal.size()));
  for (int i = 0; i < n; ++i) in.at<double>(0, i) = signal[i];
  cv::Mat spectrum;
  cv::dft(in, spectrum, cv::DFT_COMPLEX_OUTPUT);
  std::vector<double> mag(length);
  for (int k = 0; k < length; ++k) {
    const auto c = spectrum.at<cv::Vec2d>(0, k);
    mag[k] = std::hypot(c[0], c[1]);
  }
  return mag;
}

Plane fft2_magnitude(const Plane& plane) {
  if (plane.empty()) return plane;
  cv::Mat in(plane.height(), plane.width(), CV_64F);
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < plane.width(); ++x) in.at<double>(y, x) = plane.at(x, y);
  }
  cv::Mat spectrum;
  cv::dft(in, spectrum, cv::DFT_COMPLEX_OUTPUT);
  Plane out(plane.width(), plane.height());
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < plane.width(); ++x) {
      const auto c = spectrum.at<cv::Vec2d>(y, x);
      out.at(x, y) = std::hypot(c[0], c[1]);
    }
  }
  return out;
}

}  // namespace rsf
