#pragma once

// Independent reference implementations shared by the unit and acceptance
// tests. They favor directness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>

#include "rsf/features.hpp"
#include "rsf/segmentation.hpp"

namespace rsf::oracle {

// Interior pixels solve x = Σ α_k x_neighbor exactly; the one-pixel frame is
// random. Solved with a sparse LU factorization.
inline Plane fixed_point_image(const Kernel3x3& alpha, int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) img.at(x, y) = u(rng);
    }
  }
  const int iw = w - 2;
  const int ih = h - 2;
  auto id = [&](int x, int y) { return (y - 1) * iw + (x - 1); };
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(iw * ih);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      t.emplace_back(id(x, y), id(x, y), 1.0);
      for (int k = 0; k < 9; ++k) {
        if (k == 4) continue;
        const int nx = x + k % 3 - 1;
        const int ny = y + k / 3 - 1;
        if (nx == 0 || ny == 0 || nx == w - 1 || ny == h - 1) {
          b[id(x, y)] += alpha[k] * img.at(nx, ny);
        } else {
          t.emplace_back(id(x, y), id(nx, ny), -alpha[k]);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a(iw * ih, iw * ih);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  const Eigen::VectorXd x = lu.solve(b);
  for (int y = 1; y < h - 1; ++y) {
    for (int xx = 1; xx < w - 1; ++xx) img.at(xx, y) = x[id(xx, y)];
  }
  return img;
}

// Random predictor weights, zero center, Σ|α| = l1.
inline Kernel3x3 random_alpha(std::uint64_t seed, double l1 = 0.9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Kernel3x3 a{};
  double s = 0.0;
  for (int k = 0; k < 9; ++k) {
    if (k == 4) continue;
    a[k] = u(rng);
    s += std::abs(a[k]);
  }
  for (double& v : a) v *= l1 / s;
  return a;
}

struct ExactOtsu {
  int threshold = -1;  // -1 when no threshold splits the histogram
  // Maximal σ_B² as the exact rational num / den, up to a common factor N².
  boost::multiprecision::int256_t num = -1;
  boost::multiprecision::int256_t den = 1;
};

// Every threshold evaluated with integer arithmetic; ties resolved to the
// floor of the mean of all maximizers.
inline ExactOtsu brute_force_otsu(const std::vector<std::uint64_t>& counts) {
  using boost::multiprecision::int256_t;
  int256_t n = 0;
  int256_t s = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    n += counts[i];
    s += int256_t(counts[i]) * int256_t(i);
  }
  ExactOtsu r;
  std::vector<int> best_t;
  for (std::size_t t = 0; t + 1 < counts.size(); ++t) {
    int256_t n0 = 0;
    int256_t s0 = 0;
    for (std::size_t i = 0; i <= t; ++i) {
      n0 += counts[i];
      s0 += int256_t(counts[i]) * int256_t(i);
    }
    const int256_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    // N²·σ_B² = (s0·n1 − s1·n0)² / (n0·n1)
    const int256_t d = s0 * n1 - (s - s0) * n0;
    const int256_t num = d * d;
    const int256_t den = n0 * n1;
    if (r.num < 0 || num * r.den > r.num * den) {
      r.num = num;
      r.den = den;
      best_t = {static_cast<int>(t)};
    } else if (num * r.den == r.num * den) {
      best_t.push_back(static_cast<int>(t));
    }
  }
  long long sum = 0;
  for (int t : best_t) sum += t;
  if (!best_t.empty()) r.threshold = static_cast<int>(sum / static_cast<long long>(best_t.size()));
  return r;
}

// Dense combinatorial Laplacian of the 4-connected lattice, same edge weights
// as the library, solved for the unseeded potentials by full-pivot LU.
inline Plane dense_random_walker(const Plane& g, const SeedMap& seeds, double beta) {
  const int w = g.width();
  const int h = g.height();
  const int n = w * h;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  auto edge = [&](int i, int j) {
    const double d = g[i] - g[j];
    const double wij = std::exp(-beta * d * d) + 1e-6;
    lap(i, j) -= wij;
    lap(j, i) -= wij;
    lap(i, i) += wij;
    lap(j, j) += wij;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) edge(y * w + x, y * w + x + 1);
      if (y + 1 < h) edge(y * w + x, (y + 1) * w + x);
    }
  }
  std::vector<int> u;
  std::vector<int> m;
  for (int i = 0; i < n; ++i) (seeds[i] < 0 ? u : m).push_back(i);
  Plane out(w, h);
  for (int i : m) out[i] = seeds[i] == 1 ? 1.0 : 0.0;
  if (u.empty()) return out;
  Eigen::MatrixXd lu(u.size(), u.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.size()));
  for (std::size_t a = 0; a < u.size(); ++a) {
    for (std::size_t b = 0; b < u.size(); ++b) lu(a, b) = lap(u[a], u[b]);
    for (int j : m) rhs[a] -= lap(u[a], j) * (seeds[j] == 1 ? 1.0 : 0.0);
  }
  const Eigen::VectorXd x = lu.fullPivLu().solve(rhs);
  for (std::size_t a = 0; a < u.size(); ++a) out[u[a]] = x[static_cast<Eigen::Index>(a)];
  return out;
}

}  // namespace rsf::oracle
