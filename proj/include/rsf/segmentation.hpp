#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rsf/imaging.hpp"

namespace rsf {

inline constexpr int kChannelCount = 6;

enum class Channel { JpegQuality = 0, Upsample, Downsample, RotateCw, RotateCcw, Shear };

inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "jpeg_quality", "upsample", "downsample", "rotate_cw", "rotate_ccw", "shear"};

/// Six classifier-score maps on the patch grid, values in [0,1].
struct HeatmapStack {
  PatchGrid grid;
  std::array<Plane, kChannelCount> channels;

  const Plane& operator[](Channel c) const { return channels[static_cast<int>(c)]; }
  void validate() const;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { bits_[index(x, y)] = v ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }

  std::size_t count() const;
  Plane to_plane() const;
  static BinaryMask from_plane(const Plane& p, double level = 0.5);

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Gaussian spatial × Gaussian range weights, window radius ceil(3·sigma_s),
/// mirrored borders.
Plane bilateral_filter(const Plane& channel, double sigma_s = 2.0, double sigma_r = 0.1);

struct Histogram {
  std::vector<std::uint64_t> counts;

  int bins() const { return static_cast<int>(counts.size()); }
  std::uint64_t total() const;
  // Value at the middle of a bin on the [0,1] axis.
  double bin_center(int bin) const { return (bin + 0.5) / bins(); }
};

/// Uniform bins over [0,1]; value 1.0 falls in the last bin.
Histogram histogram(const Plane& channel, int bins = 256);

struct OtsuResult {
  int threshold = 0;     // class 0 = bins ≤ threshold
  double eta = 0.0;      // σ_B² / σ_T²
  std::array<double, 2> mass = {0.0, 0.0};
};

/// Maximizes the between-class variance exactly (integer arithmetic); ties
/// resolve to the floor of the mean of all maximizing thresholds.
OtsuResult otsu_threshold(const Histogram& hist);

struct ChannelSelectRule {
  double eta_min = 0.8;
  double mass_min = 0.02;
  double mode_min = 0.5;  // lowest accepted center of the upper mode
};

/// η and mass test only.
bool channel_select(const OtsuResult& otsu, const ChannelSelectRule& rule = {});

/// Full rule: η, mass, and the upper mode of `hist` at or above mode_min.
bool channel_select(const OtsuResult& otsu, const Histogram& hist, const ChannelSelectRule& rule = {});

/// Highest bin at or below the threshold and highest bin above it. Ties go to
/// the bin closest to the threshold.
std::pair<int, int> find_modes(const Histogram& hist, int threshold);

struct RandomWalkerOptions {
  double beta = 90.0;
  double tolerance = 1e-12;  // relative residual in the Jacobi (D⁻¹) norm
  int max_iterations = 50000;
};

struct RandomWalkerResult {
  Plane probability;  // P(class 2); seeds are exactly 0 or 1
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Seed labels: -1 unseeded, 0 class 1, 1 class 2.
using SeedMap = std::vector<std::int8_t>;

/// Dirichlet problem on the 4-connected lattice with edge weights
/// exp(−β(g_i−g_j)²) + 1e-6, solved by Jacobi-preconditioned CG.
RandomWalkerResult random_walker_seeded(const Plane& values, const SeedMap& seeds,
                                        const RandomWalkerOptions& options = {});

/// Seeds pixels strictly below the center of mode1 as class 1 and strictly
/// above the center of mode2 as class 2; throws SeedingError when a class has
/// no seeds.
SeedMap seeds_from_modes(const Plane& channel, int mode1, int mode2, int bins = 256);

RandomWalkerResult random_walker(const Plane& channel, int mode1, int mode2,
                                 const RandomWalkerOptions& options = {}, int bins = 256);

BinaryMask binarize(const Plane& probability, double level = 0.5);
BinaryMask combine_or(std::span<const BinaryMask> masks);

/// Pixelwise mean of the given probability maps; all zeros when none given.
Plane gray_mask(std::span<const Plane> probability_maps, int width, int height);

/// Mean of the non-zero pixels of a gray mask, 0 if there are none.
double confidence_score(const Plane& gray);

}  // namespace rsf
