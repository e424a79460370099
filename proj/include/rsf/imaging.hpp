#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace rsf {

/// Row-major 2D raster of doubles. Used for everything that lives on a pixel
/// or cell grid: luminance images, residuals, p-maps, heatmaps, spectra.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);
  Plane(int width, int height, std::vector<double> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double at(int x, int y) const { return samples_[index(x, y)]; }
  double& at(int x, int y) { return samples_[index(x, y)]; }
  double operator[](std::size_t i) const { return samples_[i]; }
  double& operator[](std::size_t i) { return samples_[i]; }

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }

  bool same_shape(const Plane& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  double min() const;
  double max() const;
  double mean() const;
  double sum() const;

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> samples_;
};

// A Plane whose samples are normalized luminance in [0,1]. Functions that
// produce ImageBuffers keep that range; residual-producing filters return
// plain Planes and may go negative.
using ImageBuffer = Plane;

bool in_unit_range(const Plane& img);
void require_unit_range(const Plane& img, const char* what);
Plane clamp_unit(Plane img);

/// Interleaved multi-channel raster, channel order R,G,B for three channels.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> samples;
};

ImageBuffer to_grayscale(const Raster& raster);

ImageBuffer load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Plane& img);
void save_jpeg(const std::filesystem::path& path, const ImageBuffer& img,
               int quality);

using Kernel3x3 = std::array<double, 9>;

inline constexpr Kernel3x3 kLaplacianKernel = {0, 1, 0, 1, -4, 1, 0, 1, 0};
inline constexpr Kernel3x3 kIdentityKernel = {0, 0, 0, 0, 1, 0, 0, 0, 0};

/// Maps an arbitrary integer coordinate into [0, n) by mirror reflection
/// about the edge samples (…2 1 | 0 1 2 … n-1 | n-2 …).
int reflect_index(int i, int n);

/// Same-size 3×3 correlation with mirrored borders. Output is not clamped.
Plane conv3x3(const Plane& img, const Kernel3x3& kernel);

/// sqrt(|Laplacian(img)|), the magnitude of the linear prediction error.
Plane laplacian_magnitude_sqrt(const Plane& img);

/// img − median3x3(img).
Plane median_residual(const Plane& img);

enum class Interpolation { Bilinear, Bicubic };

/// Forward map p' = linear·(p − c_in) + c_out + offset in pixel-area
/// coordinates, where c_in and c_out are the input and output canvas centers.
struct AffineMap {
  std::array<double, 4> linear = {1, 0, 0, 1};  // row-major 2×2
  std::array<double, 2> offset = {0, 0};

  static AffineMap identity() { return {}; }
  static AffineMap scale(double factor);
  static AffineMap scale(double sx, double sy);
  // Positive degrees rotate clockwise as displayed (y axis pointing down).
  static AffineMap rotation_cw(double degrees);
  static AffineMap shear(double k);

  double determinant() const { return linear[0] * linear[3] - linear[1] * linear[2]; }
};

/// Inverse-mapped resampling onto a canvas that holds the whole transformed
/// image. Samples falling outside the source are mirrored back inside.
Plane affine_resample(const Plane& img, const AffineMap& map,
                      Interpolation interp = Interpolation::Bilinear);

/// Same as affine_resample but with an explicit output canvas; pixels whose
/// source position lies outside the input take `fill` instead of mirroring.
Plane affine_resample_into(const Plane& img, const AffineMap& map, int out_width,
                           int out_height, Interpolation interp, double fill);

double sample_bilinear(const Plane& img, double x, double y);
double sample_bicubic(const Plane& img, double x, double y);

/// Baseline JPEG encode + decode at the given quality through the system codec.
ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality);

/// Rounds every sample to the nearest multiple of 1/255.
ImageBuffer quantize_8bit(const ImageBuffer& img);

struct PatchGrid {
  int patch_size = 64;
  int stride = 8;
  int rows = 0;
  int cols = 0;

  static PatchGrid for_image(int width, int height, int patch_size, int stride);

  std::size_t count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  std::pair<int, int> origin(int row, int col) const { return {col * stride, row * stride}; }
  // Continuous pixel-area coordinate of the patch center.
  std::pair<double, double> center(int row, int col) const {
    return {col * stride + patch_size / 2.0, row * stride + patch_size / 2.0};
  }
  // Inverse of origin(): the grid cell whose patch starts at (x, y).
  std::pair<int, int> cell_of_origin(int x, int y) const { return {y / stride, x / stride}; }
};

Plane crop(const Plane& img, int x, int y, int width, int height);
void paste(Plane& dst, const Plane& src, int x, int y);

std::pair<PatchGrid, std::vector<Plane>> extract_patches(const Plane& img, int size,
                                                          int stride);

}  // namespace rsf
