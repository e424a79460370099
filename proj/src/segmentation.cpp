#include "rsf/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "rsf/errors.hpp"

namespace rsf {

void HeatmapStack::validate() const {
  for (int c = 0; c < kChannelCount; ++c) {
    const Plane& ch = channels[c];
    if (ch.width() != grid.cols || ch.height() != grid.rows) {
      throw ShapeError("heatmap channel " + std::string(kChannelNames[c]) +
                       " does not match the patch grid");
    }
    if (!in_unit_range(ch)) {
      throw ParameterError("heatmap channel " + std::string(kChannelNames[c]) +
                           " has values outside [0,1]");
    }
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Plane BinaryMask::to_plane() const {
  Plane p(width_, height_);
  for (std::size_t i = 0; i < bits_.size(); ++i) p[i] = bits_[i];
  return p;
}

BinaryMask BinaryMask::from_plane(const Plane& p, double level) {
  BinaryMask m(p.width(), p.height());
  for (std::size_t i = 0; i < p.size(); ++i) m.set(i, p[i] > level);
  return m;
}

Plane bilateral_filter(const Plane& channel, double sigma_s, double sigma_r) {
  if (!(sigma_s > 0.0) || !(sigma_r > 0.0)) {
    throw ParameterError("bilateral filter sigmas must be positive");
  }
  const int w = channel.width();
  const int h = channel.height();
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_s));
  const int side = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[(dy + radius) * side + dx + radius] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_s * sigma_s));
    }
  }
  const double range_coeff = -1.0 / (2.0 * sigma_r * sigma_r);
  const double lo = channel.min();
  const double hi = channel.max();
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double center = channel.at(x, y);
      // Weighted mean of differences from the center.
      double num = 0.0;
      double den = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = reflect_index(y + dy, h);
        for (int dx = -radius; dx <= radius; ++dx) {
          const double v = channel.at(reflect_index(x + dx, w), yy);
          const double d = v - center;
          const double wt = spatial[(dy + radius) * side + dx + radius] * std::exp(range_coeff * d * d);
          num += wt * d;
          den += wt;
        }
      }
      out.at(x, y) = std::clamp(center + num / den, lo, hi);
    }
  }
  return out;
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

Histogram histogram(const Plane& channel, int bins) {
  if (bins < 2) throw ParameterError("histogram needs at least two bins");
  Histogram hist{std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0)};
  for (double v : channel.samples()) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("histogram values must lie in [0,1]");
    const int b = std::min(static_cast<int>(v * bins), bins - 1);
    ++hist.counts[b];
  }
  return hist;
}

OtsuResult otsu_threshold(const Histogram& hist) {
  using boost::multiprecision::int256_t;
  const int bins = hist.bins();
  int nonempty = 0;
  for (auto c : hist.counts) nonempty += c > 0 ? 1 : 0;
  if (nonempty < 2) throw DegenerateError("Otsu threshold needs at least two non-empty bins");

  std::int64_t n = 0;
  std::int64_t s = 0;
  for (int b = 0; b < bins; ++b) {
    n += static_cast<std::int64_t>(hist.counts[b]);
    s += static_cast<std::int64_t>(hist.counts[b]) * b;
  }
  // σ_B²(t) ∝ (N0·S1 − N1·S0)² / (N0·N1); compare candidates as exact fractions.
  int256_t best_num = -1;
  int256_t best_den = 1;
  std::vector<int> best;
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  for (int t = 0; t + 1 < bins; ++t) {
    n0 += static_cast<std::int64_t>(hist.counts[t]);
    s0 += static_cast<std::int64_t>(hist.counts[t]) * t;
    const std::int64_t n1 = n - n0;
    const std::int64_t s1 = s - s0;
    int256_t num = 0;
    int256_t den = 1;
    if (n0 > 0 && n1 > 0) {
      const int256_t d = int256_t(n0) * s1 - int256_t(n1) * s0;
      num = d * d;
      den = int256_t(n0) * n1;
    }
    const int256_t lhs = num * best_den;
    const int256_t rhs = best_num * den;
    if (lhs > rhs) {
      best_num = num;
      best_den = den;
      best.assign(1, t);
    } else if (lhs == rhs) {
      best.push_back(t);
    }
  }
  long sum = 0;
  for (int t : best) sum += t;
  OtsuResult result;
  result.threshold = static_cast<int>(sum / static_cast<long>(best.size()));

  long double w0 = 0.0L;
  long double m0 = 0.0L;
  for (int b = 0; b <= result.threshold; ++b) {
    w0 += hist.counts[b];
    m0 += static_cast<long double>(hist.counts[b]) * b;
  }
  const long double total = static_cast<long double>(n);
  const long double mu = static_cast<long double>(s) / total;
  const long double w1 = total - w0;
  const long double m1 = static_cast<long double>(s) - m0;
  long double between = 0.0L;
  if (w0 > 0 && w1 > 0) {
    const long double diff = m0 / w0 - m1 / w1;
    between = (w0 / total) * (w1 / total) * diff * diff;
  }
  long double var_total = 0.0L;
  for (int b = 0; b < bins; ++b) {
    const long double d = b - mu;
    var_total += static_cast<long double>(hist.counts[b]) * d * d;
  }
  var_total /= total;
  result.eta = static_cast<double>(std::clamp(between / var_total, 0.0L, 1.0L));
  result.mass = {static_cast<double>(w0 / total), static_cast<double>(w1 / total)};
  return result;
}

bool channel_select(const OtsuResult& otsu, const ChannelSelectRule& rule) {
  return otsu.eta >= rule.eta_min && std::min(otsu.mass[0], otsu.mass[1]) >= rule.mass_min;
}

bool channel_select(const OtsuResult& otsu, const Histogram& hist, const ChannelSelectRule& rule) {
  if (!channel_select(otsu, rule)) return false;
  return hist.bin_center(find_modes(hist, otsu.threshold).second) >= rule.mode_min;
}

std::pair<int, int> find_modes(const Histogram& hist, int threshold) {
  const int bins = hist.bins();
  if (threshold < 0 || threshold + 1 >= bins) throw ParameterError("threshold outside the histogram");
  int mode1 = -1;
  for (int b = 0; b <= threshold; ++b) {
    if (hist.counts[b] > 0 && (mode1 < 0 || hist.counts[b] >= hist.counts[mode1])) mode1 = b;
  }
  int mode2 = -1;
  for (int b = bins - 1; b > threshold; --b) {
    if (hist.counts[b] > 0 && (mode2 < 0 || hist.counts[b] >= hist.counts[mode2])) mode2 = b;
  }
  if (mode1 < 0 || mode2 < 0) throw DegenerateError("a side of the threshold has no samples");
  return {mode1, mode2};
}

SeedMap seeds_from_modes(const Plane& channel, int mode1, int mode2, int bins) {
  const double lo = (mode1 + 0.5) / bins;
  const double hi = (mode2 + 0.5) / bins;
  SeedMap seeds(channel.size(), -1);
  bool any1 = false;
  bool any2 = false;
  for (std::size_t i = 0; i < channel.size(); ++i) {
    if (channel[i] < lo) {
      seeds[i] = 0;
      any1 = true;
    } else if (channel[i] > hi) {
      seeds[i] = 1;
      any2 = true;
    }
  }
  if (!any1) throw SeedingError("random walker: no pixels below the first mode");
  if (!any2) throw SeedingError("random walker: no pixels above the second mode");
  return seeds;
}

RandomWalkerResult random_walker(const Plane& channel, int mode1, int mode2,
                                 const RandomWalkerOptions& options, int bins) {
  return random_walker_seeded(channel, seeds_from_modes(channel, mode1, mode2, bins), options);
}

BinaryMask binarize(const Plane& probability, double level) {
  return BinaryMask::from_plane(probability, level);
}

BinaryMask combine_or(std::span<const BinaryMask> masks) {
  if (masks.empty()) throw ParameterError("combine_or needs at least one mask");
  BinaryMask out = masks.front();
  for (const auto& m : masks.subspan(1)) {
    if (!m.same_shape(out)) throw ShapeError("combine_or: mask dimensions differ");
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (m[i]) out.set(i, true);
    }
  }
  return out;
}

Plane gray_mask(std::span<const Plane> probability_maps, int width, int height) {
  Plane out(width, height);
  if (probability_maps.empty()) return out;
  for (const auto& p : probability_maps) {
    if (p.width() != width || p.height() != height) throw ShapeError("gray_mask: shape mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
  }
  for (double& v : out.samples()) v /= static_cast<double>(probability_maps.size());
  return out;
}

double confidence_score(const Plane& gray) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : gray.samples()) {
    if (v != 0.0) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace rsf
