#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rsf/errors.hpp"
#include "rsf/segmentation.hpp"

namespace rsf {

namespace {

constexpr double kEdgeFloor = 1e-6;

// Symmetric positive definite system over the unseeded pixels in CSR form.
struct SparseSystem {
  std::vector<int> row_start;
  std::vector<int> cols;
  std::vector<double> vals;
  std::vector<double> diag;
  std::vector<double> rhs;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = diag[i] * x[i];
      for (int k = row_start[i]; k < row_start[i + 1]; ++k) acc += vals[k] * x[cols[k]];
      y[i] = acc;
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

RandomWalkerResult random_walker_seeded(const Plane& values, const SeedMap& seeds,
                                        const RandomWalkerOptions& options) {
  if (seeds.size() != values.size()) throw ShapeError("seed map does not match the image");
  if (!(options.beta > 0.0)) throw ParameterError("random walker beta must be positive");
  bool any[2] = {false, false};
  for (auto s : seeds) {
    if (s == 0 || s == 1) any[s] = true;
  }
  if (!any[0] || !any[1]) throw SeedingError("random walker needs at least one seed per class");

  const int w = values.width();
  const int h = values.height();
  std::vector<int> unknown_index(values.size(), -1);
  int n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (seeds[i] < 0) unknown_index[i] = n++;
  }

  RandomWalkerResult result;
  result.probability = Plane(w, h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (seeds[i] == 1) result.probability[i] = 1.0;
  }
  if (n == 0) return result;

  auto weight = [&](std::size_t a, std::size_t b) {
    const double d = values[a] - values[b];
    return std::exp(-options.beta * d * d) + kEdgeFloor;
  };

  SparseSystem sys;
  sys.row_start.reserve(n + 1);
  sys.diag.assign(n, 0.0);
  sys.rhs.assign(n, 0.0);
  sys.row_start.push_back(0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const int row = unknown_index[i];
      if (row < 0) continue;
      const int nx[4] = {x, x - 1, x + 1, x};
      const int ny[4] = {y - 1, y, y, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
        const double wij = weight(i, j);
        sys.diag[row] += wij;
        if (seeds[j] < 0) {
          sys.cols.push_back(unknown_index[j]);
          sys.vals.push_back(-wij);
        } else if (seeds[j] == 1) {
          sys.rhs[row] += wij;
        }
      }
      sys.row_start.push_back(static_cast<int>(sys.cols.size()));
    }
  }

  // Jacobi-preconditioned conjugate gradient.
  std::vector<double> xs(n, 0.0);
  std::vector<double> r = sys.rhs;
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> ap(n);
  for (int i = 0; i < n; ++i) z[i] = r[i] / sys.diag[i];
  // Residuals are measured in the D⁻¹ norm so weakly connected pixels count.
  const double bnorm = std::sqrt(dot(r, z));
  if (bnorm == 0.0) {
    result.relative_residual = 0.0;
  } else {
    p = z;
    double rz = dot(r, z);
    int it = 0;
    double rel = 1.0;
    for (; it < options.max_iterations; ++it) {
      sys.multiply(p, ap);
      const double alpha = rz / dot(p, ap);
      for (int i = 0; i < n; ++i) {
        xs[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      for (int i = 0; i < n; ++i) z[i] = r[i] / sys.diag[i];
      const double rz_next = dot(r, z);
      rel = std::sqrt(std::max(rz_next, 0.0)) / bnorm;
      if (rel < options.tolerance) {
        ++it;
        break;
      }
      const double beta = rz_next / rz;
      rz = rz_next;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!std::isfinite(rel)) throw NumericError("random walker: conjugate gradient diverged");
    result.iterations = it;
    result.relative_residual = rel;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (unknown_index[i] >= 0) {
      result.probability[i] = std::clamp(xs[unknown_index[i]], 0.0, 1.0);
    }
  }
  return result;
}

}  // namespace rsf
