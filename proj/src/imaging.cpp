#include "rsf/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "rsf/errors.hpp"

namespace rsf {

Plane::Plane(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw DimensionError("negative plane dimensions");
  samples_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Plane::Plane(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 0 || height < 0) throw DimensionError("negative plane dimensions");
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionError("sample count " + std::to_string(samples_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

double Plane::min() const {
  return samples_.empty() ? 0.0 : *std::min_element(samples_.begin(), samples_.end());
}

double Plane::max() const {
  return samples_.empty() ? 0.0 : *std::max_element(samples_.begin(), samples_.end());
}

double Plane::sum() const { return std::accumulate(samples_.begin(), samples_.end(), 0.0); }

double Plane::mean() const { return samples_.empty() ? 0.0 : sum() / samples_.size(); }

bool in_unit_range(const Plane& img) {
  return std::all_of(img.samples().begin(), img.samples().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

void require_unit_range(const Plane& img, const char* what) {
  if (!in_unit_range(img)) {
    throw ParameterError(std::string(what) + ": samples must lie in [0,1]");
  }
}

Plane clamp_unit(Plane img) {
  for (double& v : img.samples()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

ImageBuffer to_grayscale(const Raster& raster) {
  const std::size_t n =
      static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.height);
  if (raster.channels != 1 && raster.channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(raster.channels));
  }
  if (raster.samples.size() != n * static_cast<std::size_t>(raster.channels)) {
    throw DimensionError("raster sample count does not match its dimensions");
  }
  ImageBuffer out(raster.width, raster.height);
  if (raster.channels == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(raster.samples[i], 0.0, 1.0);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double r = raster.samples[3 * i];
    const double g = raster.samples[3 * i + 1];
    const double b = raster.samples[3 * i + 2];
    out[i] = std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
  }
  return out;
}

ImageBuffer load_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
  if (mat.empty()) throw IoError("cannot read image " + path.string());
  double scale = 1.0;
  switch (mat.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    case CV_32F:
    case CV_64F: scale = 1.0; break;
    default: throw FormatError("unsupported pixel depth in " + path.string());
  }
  if (mat.channels() == 4) cv::cvtColor(mat, mat, cv::COLOR_BGRA2BGR);
  if (mat.channels() != 1 && mat.channels() != 3) {
    throw FormatError("unsupported channel count in " + path.string());
  }
  cv::Mat real;
  mat.convertTo(real, CV_64F, scale);
  Raster raster{real.cols, real.rows, real.channels(), {}};
  raster.samples.resize(real.total() * static_cast<std::size_t>(real.channels()));
  for (int y = 0; y < real.rows; ++y) {
    const double* row = real.ptr<double>(y);
    for (int x = 0; x < real.cols; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * real.cols + x;
      if (raster.channels == 1) {
        raster.samples[i] = row[x];
      } else {
        // OpenCV stores BGR.
        raster.samples[3 * i] = row[3 * x + 2];
        raster.samples[3 * i + 1] = row[3 * x + 1];
        raster.samples[3 * i + 2] = row[3 * x];
      }
    }
  }
  return to_grayscale(raster);
}

namespace {

cv::Mat to_mat_8u(const Plane& img) {
  cv::Mat mat(img.height(), img.width(), CV_8U);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<unsigned char>(y);
    for (int x = 0; x < img.width(); ++x) {
      row[x] = static_cast<unsigned char>(std::lround(std::clamp(img.at(x, y), 0.0, 1.0) * 255.0));
    }
  }
  return mat;
}

Plane from_mat_8u(const cv::Mat& mat) {
  Plane out(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<unsigned char>(y);
    for (int x = 0; x < mat.cols; ++x) out.at(x, y) = row[x] / 255.0;
  }
  return out;
}

}  // namespace

void save_png(const std::filesystem::path& path, const Plane& img) {
  if (img.empty()) throw DimensionError("cannot write an empty image");
  if (!cv::imwrite(path.string(), to_mat_8u(img))) {
    throw IoError("cannot write " + path.string());
  }
}

void save_jpeg(const std::filesystem::path& path, const ImageBuffer& img, int quality) {
  if (quality < 1 || quality > 100) throw ParameterError("JPEG quality must be in [1,100]");
  if (!cv::imwrite(path.string(), to_mat_8u(img), {cv::IMWRITE_JPEG_QUALITY, quality})) {
    throw IoError("cannot write " + path.string());
  }
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Plane conv3x3(const Plane& img, const Kernel3x3& kernel) {
  if (img.width() < 3 || img.height() < 3) {
    throw DimensionError("conv3x3 needs an image of at least 3x3, got " +
                         std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  const int w = img.width();
  const int h = img.height();
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    const int ys[3] = {reflect_index(y - 1, h), y, reflect_index(y + 1, h)};
    for (int x = 0; x < w; ++x) {
      const int xs[3] = {reflect_index(x - 1, w), x, reflect_index(x + 1, w)};
      double acc = 0.0;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) acc += kernel[ky * 3 + kx] * img.at(xs[kx], ys[ky]);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

Plane laplacian_magnitude_sqrt(const Plane& img) {
  Plane out = conv3x3(img, kLaplacianKernel);
  for (double& v : out.samples()) v = std::sqrt(std::abs(v));
  return out;
}

Plane median_residual(const Plane& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw DimensionError("median_residual needs an image of at least 3x3");
  }
  const int w = img.width();
  const int h = img.height();
  Plane out(w, h);
  std::array<double, 9> window{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          window[k++] = img.at(reflect_index(x + dx, w), reflect_index(y + dy, h));
        }
      }
      std::nth_element(window.begin(), window.begin() + 4, window.end());
      out.at(x, y) = img.at(x, y) - window[4];
    }
  }
  return out;
}

AffineMap AffineMap::scale(double factor) { return scale(factor, factor); }

AffineMap AffineMap::scale(double sx, double sy) { return {{sx, 0, 0, sy}, {0, 0}}; }

AffineMap AffineMap::rotation_cw(double degrees) {
  // Snap quarter turns so axis-aligned rotations stay lossless.
  const double quarter = degrees / 90.0;
  double c = 0.0;
  double s = 0.0;
  if (std::abs(quarter - std::round(quarter)) < 1e-12) {
    const int q = ((static_cast<int>(std::lround(quarter)) % 4) + 4) % 4;
    constexpr double kCos[4] = {1, 0, -1, 0};
    constexpr double kSin[4] = {0, 1, 0, -1};
    c = kCos[q];
    s = kSin[q];
  } else {
    const double rad = degrees * M_PI / 180.0;
    c = std::cos(rad);
    s = std::sin(rad);
  }
  // With y pointing down, [c -s; s c] turns +x towards +y, i.e. clockwise.
  return {{c, -s, s, c}, {0, 0}};
}

AffineMap AffineMap::shear(double k) { return {{1, k, 0, 1}, {0, 0}}; }

double sample_bilinear(const Plane& img, double x, double y) {
  const int w = img.width();
  const int h = img.height();
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const int xa = reflect_index(x0, w);
  const int xb = reflect_index(x0 + 1, w);
  const int ya = reflect_index(y0, h);
  const int yb = reflect_index(y0 + 1, h);
  const double top = img.at(xa, ya) * (1.0 - fx) + (fx == 0.0 ? 0.0 : img.at(xb, ya) * fx);
  if (fy == 0.0) return top;
  const double bottom = img.at(xa, yb) * (1.0 - fx) + (fx == 0.0 ? 0.0 : img.at(xb, yb) * fx);
  return top * (1.0 - fy) + bottom * fy;
}

namespace {

// Keys cubic convolution kernel, a = -0.5.
double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

}  // namespace

double sample_bicubic(const Plane& img, double x, double y) {
  const int w = img.width();
  const int h = img.height();
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  if (fx == 0.0 && fy == 0.0) {
    return img.at(reflect_index(static_cast<int>(fx0), w), reflect_index(static_cast<int>(fy0), h));
  }
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  double acc = 0.0;
  for (int j = -1; j <= 2; ++j) {
    const double wy = cubic_weight(j - fy);
    if (wy == 0.0) continue;
    const int yy = reflect_index(y0 + j, h);
    double row = 0.0;
    for (int i = -1; i <= 2; ++i) {
      row += cubic_weight(i - fx) * img.at(reflect_index(x0 + i, w), yy);
    }
    acc += wy * row;
  }
  return acc;
}

namespace {

struct InverseMap {
  std::array<double, 4> inv;
  double in_cx, in_cy, out_cx, out_cy, ox, oy;

  // Output pixel index -> source pixel index coordinates.
  std::pair<double, double> operator()(int x, int y) const {
    const double u = x + 0.5 - out_cx - ox;
    const double v = y + 0.5 - out_cy - oy;
    return {inv[0] * u + inv[1] * v + in_cx - 0.5, inv[2] * u + inv[3] * v + in_cy - 0.5};
  }
};

InverseMap make_inverse(const Plane& img, const AffineMap& map, int out_w, int out_h) {
  const double det = map.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12) {
    throw InvalidTransformError("affine matrix is singular");
  }
  const auto& m = map.linear;
  return {{m[3] / det, -m[1] / det, -m[2] / det, m[0] / det},
          img.width() / 2.0,
          img.height() / 2.0,
          out_w / 2.0,
          out_h / 2.0,
          map.offset[0],
          map.offset[1]};
}

}  // namespace

Plane affine_resample_into(const Plane& img, const AffineMap& map, int out_width,
                           int out_height, Interpolation interp, double fill) {
  if (img.empty()) throw DimensionError("cannot resample an empty image");
  const InverseMap inv = make_inverse(img, map, out_width, out_height);
  Plane out(out_width, out_height, fill);
  const double w = img.width();
  const double h = img.height();
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const auto [sx, sy] = inv(x, y);
      if (sx < -0.5 || sy < -0.5 || sx > w - 0.5 || sy > h - 0.5) continue;
      out.at(x, y) = interp == Interpolation::Bilinear ? sample_bilinear(img, sx, sy)
                                                       : sample_bicubic(img, sx, sy);
    }
  }
  return out;
}

Plane affine_resample(const Plane& img, const AffineMap& map, Interpolation interp) {
  if (img.empty()) throw DimensionError("cannot resample an empty image");
  if (std::abs(map.determinant()) < 1e-12 || !std::isfinite(map.determinant())) {
    throw InvalidTransformError("affine matrix is singular");
  }
  // Bounding box of the transformed canvas corners.
  const double hw = img.width() / 2.0;
  const double hh = img.height() / 2.0;
  const auto& m = map.linear;
  double ex = 0.0;
  double ey = 0.0;
  for (const double sx : {-hw, hw}) {
    for (const double sy : {-hh, hh}) {
      ex = std::max(ex, std::abs(m[0] * sx + m[1] * sy));
      ey = std::max(ey, std::abs(m[2] * sx + m[3] * sy));
    }
  }
  const int out_w = std::max(1, static_cast<int>(std::ceil(2.0 * ex - 1e-9)));
  const int out_h = std::max(1, static_cast<int>(std::ceil(2.0 * ey - 1e-9)));
  const InverseMap inv = make_inverse(img, map, out_w, out_h);
  Plane out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const auto [sx, sy] = inv(x, y);
      out.at(x, y) = interp == Interpolation::Bilinear ? sample_bilinear(img, sx, sy)
                                                       : sample_bicubic(img, sx, sy);
    }
  }
  return out;
}

ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality) {
  if (quality < 1 || quality > 100) {
    throw ParameterError("JPEG quality must be in [1,100], got " + std::to_string(quality));
  }
  if (img.empty()) throw DimensionError("cannot compress an empty image");
  std::vector<unsigned char> bytes;
  try {
    if (!cv::imencode(".jpg", to_mat_8u(img), bytes,
                      {cv::IMWRITE_JPEG_QUALITY, quality, cv::IMWRITE_JPEG_OPTIMIZE, 0})) {
      throw CompressionError("JPEG encoder rejected the image");
    }
    cv::Mat decoded = cv::imdecode(bytes, cv::IMREAD_GRAYSCALE);
    if (decoded.empty()) throw CompressionError("JPEG decoder failed");
    return from_mat_8u(decoded);
  } catch (const cv::Exception& e) {
    throw CompressionError(std::string("JPEG codec failure: ") + e.what());
  }
}

ImageBuffer quantize_8bit(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (double& v : out.samples()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return out;
}

PatchGrid PatchGrid::for_image(int width, int height, int patch_size, int stride) {
  if (patch_size < 1 || stride < 1) throw ParameterError("patch size and stride must be positive");
  if (width < patch_size || height < patch_size) {
    throw DimensionError("image " + std::to_string(width) + "x" + std::to_string(height) +
                         " is smaller than the patch size " + std::to_string(patch_size));
  }
  PatchGrid g;
  g.patch_size = patch_size;
  g.stride = stride;
  g.rows = (height - patch_size) / stride + 1;
  g.cols = (width - patch_size) / stride + 1;
  return g;
}

Plane crop(const Plane& img, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 0 || height < 0 || x + width > img.width() ||
      y + height > img.height()) {
    throw DimensionError("crop rectangle exceeds the image");
  }
  Plane out(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out.at(c, r) = img.at(x + c, y + r);
  }
  return out;
}

void paste(Plane& dst, const Plane& src, int x, int y) {
  if (x < 0 || y < 0 || x + src.width() > dst.width() || y + src.height() > dst.height()) {
    throw DimensionError("paste rectangle exceeds the destination");
  }
  for (int r = 0; r < src.height(); ++r) {
    for (int c = 0; c < src.width(); ++c) dst.at(x + c, y + r) = src.at(c, r);
  }
}

std::pair<PatchGrid, std::vector<Plane>> extract_patches(const Plane& img, int size,
                                                          int stride) {
  const PatchGrid grid = PatchGrid::for_image(img.width(), img.height(), size, stride);
  std::vector<Plane> patches;
  patches.reserve(grid.count());
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const auto [x, y] = grid.origin(r, c);
      patches.push_back(crop(img, x, y, size, size));
    }
  }
  return {grid, std::move(patches)};
}

}  // namespace rsf
