#include "rsf/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Dense>

#include "rsf/errors.hpp"
#include "rsf/fft.hpp"
#include "rsf/parallel.hpp"

namespace rsf {

// ---------------------------------------------------------------------------
// Radon feature

int radon_projection_length(int width) {
  int len = static_cast<int>(std::ceil(width * std::sqrt(2.0) - 1e-9));
  if ((len - width) % 2 != 0) ++len;
  return len;
}

std::vector<double> radon_projection(const Plane& img, double angle_deg) {
  if (img.width() != img.height()) {
    throw DimensionError("radon_projection needs a square patch, got " +
                         std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  if (img.empty()) throw DimensionError("radon_projection of an empty patch");
  const int w = img.width();
  const int len = radon_projection_length(w);
  // Inverse rotation from canvas to patch, in pixel-area coordinates. The
  // patch is the bilinear interpolant of its samples with zeros outside, so
  // the hat weights of every canvas sample sum to one and mass is conserved.
  const auto& l = AffineMap::rotation_cw(-angle_deg).linear;
  const double det = l[0] * l[3] - l[1] * l[2];
  const double i00 = l[3] / det;
  const double i01 = -l[1] / det;
  const double i10 = -l[2] / det;
  const double i11 = l[0] / det;
  const double c_out = len / 2.0;
  const double c_in = w / 2.0 - 0.5;
  auto pixel = [&](int x, int y) {
    return x < 0 || y < 0 || x >= w || y >= w ? 0.0 : img.at(x, y);
  };
  std::vector<double> proj(len, 0.0);
  for (int y = 0; y < len; ++y) {
    const double py = y + 0.5 - c_out;
    for (int x = 0; x < len; ++x) {
      const double px = x + 0.5 - c_out;
      const double sx = i00 * px + i01 * py + c_in;
      const double sy = i10 * px + i11 * py + c_in;
      if (sx <= -1.0 || sy <= -1.0 || sx >= w || sy >= w) continue;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double fx = sx - fx0;
      const double fy = sy - fy0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      proj[x] += (1.0 - fy) * ((1.0 - fx) * pixel(x0, y0) + fx * pixel(x0 + 1, y0)) +
                 fy * ((1.0 - fx) * pixel(x0, y0 + 1) + fx * pixel(x0 + 1, y0 + 1));
    }
  }
  return proj;
}

namespace {

// Projection of an all-ones patch: the support envelope at one angle.
const std::vector<double>& radon_envelope(int width, double angle_deg) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({width, angle_deg});
  if (it == cache.end()) {
    it = cache.emplace(std::make_pair(width, angle_deg),
                       radon_projection(Plane(width, width, 1.0), angle_deg)).first;
  }
  return it->second;
}

}  // namespace

ResamplingFeature radon_resampling_feature(const Plane& patch, const RadonConfig& cfg) {
  if (patch.width() != cfg.patch_size || patch.height() != cfg.patch_size) {
    throw DimensionError("resampling feature expects a " + std::to_string(cfg.patch_size) +
                         "x" + std::to_string(cfg.patch_size) + " patch, got " +
                         std::to_string(patch.width()) + "x" + std::to_string(patch.height()));
  }
  if (cfg.angles < 1 || cfg.bins < 1) throw ParameterError("angles and bins must be positive");
  if (radon_projection_length(cfg.patch_size) > cfg.fft_length()) {
    throw ParameterError("FFT length too short for the projection of this patch size");
  }
  constexpr double kEps = 1e-8;
  const Plane residual = laplacian_magnitude_sqrt(patch);
  ResamplingFeature feature;
  feature.angles = cfg.angles;
  feature.bins = cfg.bins;
  feature.values.resize(static_cast<std::size_t>(cfg.feature_length()));
  for (int a = 0; a < cfg.angles; ++a) {
    std::vector<double> proj = radon_projection(residual, cfg.angle_deg(a));
    const std::vector<double>& envelope = radon_envelope(cfg.patch_size, cfg.angle_deg(a));
    double total = 0.0;
    double support = 0.0;
    for (std::size_t i = 0; i < proj.size(); ++i) {
      total += proj[i];
      support += envelope[i];
    }
    // The mean is removed inside the patch support, so the outline of the
    // rotated square does not leak into the spectrum.
    const double mean = total / support;
    for (std::size_t i = 0; i < proj.size(); ++i) proj[i] -= mean * envelope[i];
    const std::vector<double> mag = fft_magnitude(proj, cfg.fft_length());
    const double norm = std::abs(total) + kEps;
    for (int k = 0; k < cfg.bins; ++k) {
      feature.values[static_cast<std::size_t>(a) * cfg.bins + k] = mag[k + 1] / norm;
    }
  }
  return feature;
}

std::vector<ResamplingFeature> radon_features_for_grid(const Plane& img, const PatchGrid& grid,
                                                       const RadonConfig& cfg) {
  std::vector<ResamplingFeature> out(grid.count());
  parallel_for(grid.count(), [&](std::size_t i) {
    const int r = static_cast<int>(i) / grid.cols;
    const int c = static_cast<int>(i) % grid.cols;
    const auto [x, y] = grid.origin(r, c);
    out[i] = radon_resampling_feature(crop(img, x, y, grid.patch_size, grid.patch_size), cfg);
    out[i].origin_x = x;
    out[i].origin_y = y;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Feature cache

namespace {

constexpr char kFeatureMagic[4] = {'R', 'S', 'F', 'T'};
constexpr std::uint32_t kFeatureVersion = 1;

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError("truncated feature cache");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_feature_cache(const std::filesystem::path& path,
                         const std::vector<ResamplingFeature>& features, int angles, int bins) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kFeatureMagic, 4);
  write_le<std::uint32_t>(os, kFeatureVersion);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(angles));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(bins));
  write_le<std::uint64_t>(os, features.size());
  const std::size_t len = static_cast<std::size_t>(angles) * bins;
  for (const auto& f : features) {
    if (f.values.size() != len) throw ShapeError("feature length does not match cache header");
    for (double v : f.values) write_le<float>(os, static_cast<float>(v));
  }
  if (!os) throw IoError("failed writing " + path.string());
}

std::vector<ResamplingFeature> read_feature_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kFeatureMagic, 4) != 0) {
    throw FormatError(path.string() + " is not a feature cache");
  }
  const auto version = read_le<std::uint32_t>(is);
  if (version != kFeatureVersion) {
    throw FormatError("unsupported feature cache version " + std::to_string(version));
  }
  const auto angles = read_le<std::uint32_t>(is);
  const auto bins = read_le<std::uint32_t>(is);
  const auto count = read_le<std::uint64_t>(is);
  std::vector<ResamplingFeature> out(count);
  for (auto& f : out) {
    f.angles = static_cast<int>(angles);
    f.bins = static_cast<int>(bins);
    f.values.resize(static_cast<std::size_t>(angles) * bins);
    for (double& v : f.values) v = read_le<float>(is);
  }
  return out;
}

// ---------------------------------------------------------------------------
// P-maps

PredictorKernel::PredictorKernel() : weights_(kDefault) {}

PredictorKernel::PredictorKernel(const Kernel3x3& weights) : weights_(weights) {
  if (weights_[4] != 0.0) throw ParameterError("predictor kernel center weight must be zero");
}

Plane predictor_residual(const Plane& img, const PredictorKernel& kernel) {
  Plane e = conv3x3(img, kernel.weights());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = img[i] - e[i];
  return e;
}

PMap fast_pmap(const Plane& img, const PredictorKernel& kernel, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("p-map sigma must be positive");
  Plane p = predictor_residual(img, kernel);
  const double inv = 1.0 / (sigma * sigma);
  for (double& v : p.samples()) v = std::exp(-v * v * inv);
  return p;
}

namespace {

constexpr int kNeighbors[8] = {0, 1, 2, 3, 5, 6, 7, 8};
constexpr double kSigmaFloor = 1e-10;

double gaussian_density(double e, double sigma) {
  return std::exp(-0.5 * e * e / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
}

// Uniform outlier density from the residual dynamic range over interior pixels.
double uniform_density(const Plane& e) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int y = 1; y + 1 < e.height(); ++y) {
    for (int x = 1; x + 1 < e.width(); ++x) {
      lo = std::min(lo, e.at(x, y));
      hi = std::max(hi, e.at(x, y));
    }
  }
  return 1.0 / std::max(hi - lo, kSigmaFloor);
}

Plane e_step(const Plane& residual, double sigma, double p0) {
  Plane w(residual.width(), residual.height());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double g = gaussian_density(residual[i], sigma);
    w[i] = g / (g + p0);
  }
  return w;
}

double weighted_interior_sum(const Plane& w, const Plane& e) {
  double s = 0.0;
  for (int y = 1; y + 1 < e.height(); ++y) {
    for (int x = 1; x + 1 < e.width(); ++x) s += w.at(x, y) * e.at(x, y) * e.at(x, y);
  }
  return s;
}

}  // namespace

EmResult em_pmap(const Plane& img, const EmOptions& options) {
  if (options.max_iters < 1) throw ParameterError("em_pmap: max_iters must be at least 1");
  if (!(options.eps > 0.0)) throw ParameterError("em_pmap: eps must be positive");
  if (img.width() < 3 || img.height() < 3) {
    throw DimensionError("em_pmap needs an image of at least 3x3");
  }

  EmResult result;
  EmState& state = result.state;
  Plane residual = predictor_residual(img, state.kernel);
  {
    double s = 0.0;
    double s2 = 0.0;
    std::size_t n = 0;
    for (int y = 1; y + 1 < img.height(); ++y) {
      for (int x = 1; x + 1 < img.width(); ++x) {
        s += residual.at(x, y);
        s2 += residual.at(x, y) * residual.at(x, y);
        ++n;
      }
    }
    const double mean = s / static_cast<double>(n);
    state.sigma = std::max(std::sqrt(std::max(s2 / n - mean * mean, 0.0)), kSigmaFloor);
  }

  for (int iter = 0; iter < options.max_iters; ++iter) {
    const Plane w = e_step(residual, state.sigma, uniform_density(residual));

    Eigen::Matrix<double, 8, 8> normal = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
    for (int y = 1; y + 1 < img.height(); ++y) {
      for (int x = 1; x + 1 < img.width(); ++x) {
        Eigen::Matrix<double, 8, 1> n;
        for (int k = 0; k < 8; ++k) {
          const int idx = kNeighbors[k];
          n[k] = img.at(x + idx % 3 - 1, y + idx / 3 - 1);
        }
        const double wi = w.at(x, y);
        normal.noalias() += wi * n * n.transpose();
        rhs.noalias() += wi * img.at(x, y) * n;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> eig(normal,
                                                                    Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || lmin <= 1e-14 * lmax) {
      throw DegenerateError(
          "em_pmap: singular normal equations (image lacks texture, e.g. constant)");
    }
    const Eigen::Matrix<double, 8, 1> alpha = normal.ldlt().solve(rhs);

    Kernel3x3 next{};
    double delta = 0.0;
    for (int k = 0; k < 8; ++k) {
      next[kNeighbors[k]] = alpha[k];
      delta = std::max(delta, std::abs(alpha[k] - state.kernel[kNeighbors[k]]));
    }
    const double before = weighted_interior_sum(w, residual);
    state.kernel = PredictorKernel(next);
    residual = predictor_residual(img, state.kernel);
    const double after = weighted_interior_sum(w, residual);
    result.weighted_residuals.emplace_back(before, after);

    double wsum = 0.0;
    for (int y = 1; y + 1 < img.height(); ++y) {
      for (int x = 1; x + 1 < img.width(); ++x) wsum += w.at(x, y);
    }
    state.sigma = std::max(std::sqrt(after / std::max(wsum, 1e-300)), kSigmaFloor);
    state.iterations = iter + 1;
    if (delta < options.eps) break;
  }

  result.pmap = e_step(residual, state.sigma, uniform_density(residual));
  return result;
}

Plane pmap_spectrum(const PMap& pmap) {
  Plane centered = pmap;
  const double mean = pmap.mean();
  for (double& v : centered.samples()) v -= mean;
  Plane spectrum = fft2_magnitude(centered);
  if (!spectrum.empty()) spectrum[0] = 0.0;
  return spectrum;
}

double spectral_peak_ratio(const Plane& spectrum) {
  if (spectrum.empty()) throw ParameterError("spectral_peak_ratio of an empty spectrum");
  const int w = spectrum.width();
  const int h = spectrum.height();
  auto near_dc = [](int k, int n) { return k <= 1 || k >= n - 1; };
  std::vector<double> values;
  values.reserve(spectrum.size());
  double peak = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (near_dc(x, w) && near_dc(y, h)) continue;
      values.push_back(spectrum.at(x, y));
      peak = std::max(peak, spectrum.at(x, y));
    }
  }
  if (values.empty() || peak == 0.0) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double median = values[mid];
  if (values.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(values.begin(), values.begin() + mid));
  }
  if (median <= 0.0) return kPeakRatioSentinel;
  return std::min(peak / median, kPeakRatioSentinel);
}

}  // namespace rsf
