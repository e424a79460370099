#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rsf/imaging.hpp"

namespace rsf {

// ---------------------------------------------------------------------------
// Radon/FFT resampling feature
// ---------------------------------------------------------------------------

struct RadonConfig {
  int patch_size = 64;
  int angles = 8;  // uniform over [0°, 180°)
  int bins = 64;   // magnitude bins 1..bins of a 2·bins point FFT

  int fft_length() const { return 2 * bins; }
  int feature_length() const { return angles * bins; }
  double angle_deg(int a) const { return 180.0 * a / angles; }

  // Default for a given patch size: one bin per pixel of patch width.
  static RadonConfig for_patch(int patch_size, int angles = 8) {
    return {patch_size, angles, patch_size};
  }
};

struct ResamplingFeature {
  std::vector<double> values;  // angle-major: values[a * bins + k]
  int angles = 0;
  int bins = 0;
  int origin_x = 0;
  int origin_y = 0;
};

/// Length of the projection computed for a square patch of the given width:
/// the smallest length ≥ width·√2 with the same parity as width, so the
/// rotated patch always fits and 0°/90° projections land on whole samples.
int radon_projection_length(int width);

/// Line-integral projection: the bilinear interpolant of the patch, zero
/// outside its samples, is rotated by −angle onto a canvas of
/// radon_projection_length() and summed by column.
/// At 0° the central `width` entries are exactly the column sums.
std::vector<double> radon_projection(const Plane& img, double angle_deg);

/// sqrt|Laplacian| → projections at cfg.angles uniform angles → per
/// projection: remove the mean within the patch support (mean times the
/// projection of an all-ones patch), zero-pad to cfg.fft_length(), keep |FFT| bins
/// 1..cfg.bins, divide by the projection's total mass + 1e-8.
ResamplingFeature radon_resampling_feature(const Plane& patch, const RadonConfig& cfg = {});

/// Features for every patch of a PatchGrid, in row-major grid order.
std::vector<ResamplingFeature> radon_features_for_grid(const Plane& img, const PatchGrid& grid,
                                                       const RadonConfig& cfg = {});

// Feature cache: "RSFT", u32 version, u32 A, u32 B, u64 count, then count rows
// of A·B little-endian float32.
void write_feature_cache(const std::filesystem::path& path,
                         const std::vector<ResamplingFeature>& features, int angles, int bins);
std::vector<ResamplingFeature> read_feature_cache(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Probability maps
// ---------------------------------------------------------------------------

using PMap = Plane;

/// 3×3 linear predictor weights; the center weight is always zero.
class PredictorKernel {
 public:
  PredictorKernel();  // the fixed bilinear-style predictor
  explicit PredictorKernel(const Kernel3x3& weights);

  const Kernel3x3& weights() const { return weights_; }
  double operator[](int i) const { return weights_[i]; }

  static constexpr Kernel3x3 kDefault = {-0.25, 0.5, -0.25, 0.5, 0.0, 0.5, -0.25, 0.5, -0.25};

 private:
  Kernel3x3 weights_;
};

/// Default residual scale of fast_pmap: one 8-bit gray level.
inline constexpr double kDefaultPmapSigma = 1.0 / 255.0;

/// Residual of the linear predictor, e = img − conv3x3(img, kernel).
Plane predictor_residual(const Plane& img, const PredictorKernel& kernel);

/// p = exp(−e²/σ²) on the residual of a fixed predictor.
PMap fast_pmap(const Plane& img, const PredictorKernel& kernel = PredictorKernel(),
               double sigma = kDefaultPmapSigma);

struct EmState {
  PredictorKernel kernel;
  double sigma = 1.0;
  int iterations = 0;
};

struct EmOptions {
  int max_iters = 50;
  double eps = 1e-6;
};

struct EmResult {
  PMap pmap;
  EmState state;
  // Per M-step: Σ w·e² before and after the weight update, with w held fixed.
  std::vector<std::pair<double, double>> weighted_residuals;
};

/// Two-class EM: Gaussian residual class vs uniform outlier class. The
/// predictor weights are re-estimated by weighted least squares over interior
/// pixels until they move by less than eps (max-norm) or max_iters is hit.
EmResult em_pmap(const Plane& img, const EmOptions& options = {});

/// |FFT2(pmap − mean)|, DC at (0,0).
Plane pmap_spectrum(const PMap& pmap);

/// (max outside the 3×3 circular DC neighbourhood) / (median over the same
/// bins). 0 for an all-zero spectrum; 1e12 when the median is zero.
double spectral_peak_ratio(const Plane& spectrum);

inline constexpr double kPeakRatioSentinel = 1e12;

}  // namespace rsf
