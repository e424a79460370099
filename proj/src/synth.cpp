#include "rsf/synth.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "rsf/errors.hpp"

namespace rsf {

namespace {

cv::Mat gaussian_noise(int w, int h, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  cv::Mat m(h, w, CV_64F);
  for (int y = 0; y < h; ++y) {
    auto* row = m.ptr<double>(y);
    for (int x = 0; x < w; ++x) row[x] = n01(rng);
  }
  return m;
}

cv::Mat smooth_field(int w, int h, double sigma, std::mt19937_64& rng) {
  cv::Mat m = gaussian_noise(w, h, rng);
  cv::GaussianBlur(m, m, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT_101);
  cv::Scalar mean;
  cv::Scalar stddev;
  cv::meanStdDev(m, mean, stddev);
  m = (m - mean[0]) / std::max(stddev[0], 1e-12);
  return m;
}

}  // namespace

ImageBuffer synthesize_raw_image(int width, int height, std::uint64_t seed) {
  if (width < 8 || height < 8) throw DimensionError("synthetic images must be at least 8x8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Background: 1/f-like mixture of smoothed noise fields.
  cv::Mat img = cv::Mat::zeros(height, width, CV_64F);
  for (double sigma : {32.0, 16.0, 8.0, 4.0, 2.0}) {
    const double amp = std::pow(sigma, 0.6) * (0.5 + u01(rng));
    img += amp * smooth_field(width, height, sigma, rng);
  }
  {
    cv::Scalar mean;
    cv::Scalar stddev;
    cv::meanStdDev(img, mean, stddev);
    const double target_std = 0.08 + 0.08 * u01(rng);
    img = (img - mean[0]) * (target_std / std::max(stddev[0], 1e-12)) + (0.35 + 0.3 * u01(rng));
  }

  // Objects with sharp anti-aliased boundaries and their own texture.
  const int shapes = 8 + static_cast<int>(u01(rng) * 16);
  for (int s = 0; s < shapes; ++s) {
    cv::Mat mask = cv::Mat::zeros(height, width, CV_8U);
    const cv::Point center(static_cast<int>(u01(rng) * width), static_cast<int>(u01(rng) * height));
    const int extent = static_cast<int>((0.05 + 0.2 * u01(rng)) * std::min(width, height));
    if (u01(rng) < 0.5) {
      cv::ellipse(mask, center, cv::Size(extent, static_cast<int>(extent * (0.3 + u01(rng)))),
                  u01(rng) * 180.0, 0.0, 360.0, cv::Scalar(255), cv::FILLED, cv::LINE_AA);
    } else {
      std::vector<cv::Point> poly;
      const int corners = 3 + static_cast<int>(u01(rng) * 4);
      for (int k = 0; k < corners; ++k) {
        const double a = 2.0 * M_PI * (k + 0.3 * u01(rng)) / corners;
        const double r = extent * (0.5 + 0.5 * u01(rng));
        poly.emplace_back(center.x + static_cast<int>(r * std::cos(a)),
                          center.y + static_cast<int>(r * std::sin(a)));
      }
      cv::fillPoly(mask, std::vector<std::vector<cv::Point>>{poly}, cv::Scalar(255), cv::LINE_AA);
    }
    cv::Mat alpha;
    mask.convertTo(alpha, CV_64F, 1.0 / 255.0);
    const double level = 0.1 + 0.8 * u01(rng);
    cv::Mat texture = smooth_field(width, height, 0.6 + 1.5 * u01(rng), rng) * (0.01 + 0.05 * u01(rng));
    cv::Mat fill = texture + level;
    img = img.mul(1.0 - alpha) + fill.mul(alpha);
  }

  // Fine stationary texture everywhere plus white sensor noise.
  img += smooth_field(width, height, 0.8, rng) * (0.005 + 0.015 * u01(rng));
  img += gaussian_noise(width, height, rng) * ((1.0 + 2.0 * u01(rng)) / 255.0);

  ImageBuffer out(width, height);
  for (int y = 0; y < height; ++y) {
    const auto* row = img.ptr<double>(y);
    for (int x = 0; x < width; ++x) out.at(x, y) = row[x];
  }
  return quantize_8bit(clamp_unit(std::move(out)));
}

}  // namespace rsf
