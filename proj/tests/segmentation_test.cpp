#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rsf/errors.hpp"
#include "rsf/segmentation.hpp"
#include "test_util.hpp"

namespace rsf {
namespace {

Histogram from_counts(std::vector<std::uint64_t> counts) {
  Histogram h;
  h.counts = std::move(counts);
  return h;
}

Plane gaussian_samples(int w, int h, std::vector<std::pair<double, double>> modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Plane p(w, h);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [mu, sigma] = modes[i % modes.size()];
    std::normal_distribution<double> n(mu, sigma);
    p[i] = std::clamp(n(rng), 0.0, 1.0);
  }
  return p;
}

double exact_eta(const Histogram& h, const oracle::ExactOtsu& e) {
  using boost::multiprecision::int256_t;
  int256_t n = 0;
  int256_t s = 0;
  int256_t s2 = 0;
  for (int i = 0; i < h.bins(); ++i) {
    n += h.counts[i];
    s += int256_t(h.counts[i]) * i;
    s2 += int256_t(h.counts[i]) * i * i;
  }
  // N²·σ_T² = N·Σc·i² − S²
  const int256_t total = n * s2 - s * s;
  return static_cast<long double>(e.num) / static_cast<long double>(e.den) /
         static_cast<long double>(total);
}

TEST(Bilateral, ConstantIsFixedPoint) {
  const Plane c(13, 9, 0.37);
  const Plane out = bilateral_filter(c);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], 0.37);
}

TEST(Bilateral, StaysWithinInputRange) {
  for (int t = 0; t < 10; ++t) {
    const Plane p = test::random_plane(17, 11, 40 + t, 0.2, 0.7);
    const Plane out = bilateral_filter(p, 1.0 + t * 0.3, 0.05 + t * 0.05);
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_GE(out[i], p.min());
      EXPECT_LE(out[i], p.max());
    }
  }
}

TEST(Bilateral, PreservesStepUnlikeGaussianBlur) {
  Plane step(24, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 12; x < 24; ++x) step.at(x, y) = 1.0;
  }
  const Plane bil = bilateral_filter(step, 2.0, 0.01);
  // A huge range sigma reduces the filter to a plain Gaussian blur.
  const Plane blur = bilateral_filter(step, 2.0, 1e6);
  auto max_gradient = [](const Plane& p, int y) {
    int arg = 0;
    double best = -1.0;
    for (int x = 0; x + 1 < p.width(); ++x) {
      const double g = std::abs(p.at(x + 1, y) - p.at(x, y));
      if (g > best) {
        best = g;
        arg = x;
      }
    }
    return std::make_pair(arg, best);
  };
  for (int y = 0; y < 8; ++y) {
    const auto [bx, bg] = max_gradient(bil, y);
    const auto [gx, gg] = max_gradient(blur, y);
    EXPECT_EQ(bx, 11);
    EXPECT_NEAR(bg, 1.0, 1e-9);
    EXPECT_EQ(gx, 11);
    EXPECT_LT(gg, 0.5);
  }
  EXPECT_THROW(bilateral_filter(step, 0.0, 0.1), ParameterError);
  EXPECT_THROW(bilateral_filter(step, 1.0, -0.1), ParameterError);
}

TEST(HistogramTest, SpecCases) {
  const Histogram zeros = histogram(Plane(5, 4, 0.0));
  EXPECT_EQ(zeros.counts[0], 20u);
  EXPECT_EQ(zeros.total(), 20u);

  Plane half(10, 1);
  for (int x = 5; x < 10; ++x) half.at(x, 0) = 1.0;
  const Histogram h = histogram(half);
  EXPECT_EQ(h.counts.front(), 5u);
  EXPECT_EQ(h.counts.back(), 5u);

  const Plane r = test::random_plane(31, 17, 2);
  EXPECT_EQ(histogram(r, 64).total(), r.size());
  EXPECT_EQ(histogram(r, 64).bins(), 64);

  Plane bad(2, 1);
  bad.at(0, 0) = 1.5;
  EXPECT_THROW(histogram(bad), ParameterError);
}

TEST(Otsu, PointMassesTieBreak) {
  std::vector<std::uint64_t> c(256, 0);
  c[50] = 1000;
  c[200] = 1000;
  const OtsuResult r = otsu_threshold(from_counts(c));
  EXPECT_EQ(r.threshold, 124);
  EXPECT_NEAR(r.eta, 1.0, 1e-12);
  EXPECT_NEAR(r.mass[0], 0.5, 1e-12);
  EXPECT_NEAR(r.mass[0] + r.mass[1], 1.0, 1e-12);
  EXPECT_EQ(find_modes(from_counts(c), r.threshold), std::make_pair(50, 200));
}

TEST(Otsu, TwoNarrowGaussians) {
  const Plane p = gaussian_samples(400, 250, {{0.2, 0.02}, {0.8, 0.02}}, 3);
  const Histogram h = histogram(p);
  const OtsuResult r = otsu_threshold(h);
  EXPECT_EQ(r.threshold, oracle::brute_force_otsu(h.counts).threshold);
  EXPECT_NEAR(r.threshold, 128, 5);
  EXPECT_GT(r.eta, 0.9);
  EXPECT_TRUE(channel_select(r));
  const auto [m1, m2] = find_modes(h, r.threshold);
  EXPECT_NEAR(m1, 51, 3);
  EXPECT_NEAR(m2, 204, 3);
}

// A unimodal Gaussian gives η = 2/π under Otsu, above the 0.5 bimodality
// cutoff; the default rule still rejects it.
TEST(Otsu, UnimodalGaussian) {
  const Plane p = gaussian_samples(500, 400, {{0.5, 0.1}}, 4);
  const OtsuResult r = otsu_threshold(histogram(p));
  EXPECT_NEAR(r.eta, 2.0 / M_PI, 0.01);
  EXPECT_FALSE(channel_select(r));
}

TEST(Otsu, MatchesBruteForceOnRandomHistograms) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::uint64_t> c(256, 0);
    const int style = t % 4;
    std::uniform_int_distribution<int> bin(0, 255);
    if (style == 0) {
      for (auto& v : c) v = rng() % 1000;
    } else if (style == 1) {
      for (int k = 0; k < 2 + t % 7; ++k) c[bin(rng)] += 1 + rng() % 50;
    } else if (style == 2) {
      for (auto& v : c) v = rng() % 3 == 0 ? rng() % 1000000000ULL : 0;
    } else {
      for (int k = 0; k < 2; ++k) c[bin(rng)] = 7;
    }
    if (std::count_if(c.begin(), c.end(), [](auto v) { return v > 0; }) < 2) {
      c[0] += 1;
      c[255] += 1;
    }
    const Histogram h = from_counts(c);
    const OtsuResult r = otsu_threshold(h);
    const oracle::ExactOtsu e = oracle::brute_force_otsu(c);
    ASSERT_EQ(r.threshold, e.threshold) << "histogram " << t;
    EXPECT_NEAR(r.eta, exact_eta(h, e), 1e-12);
    EXPECT_GE(r.eta, 0.0);
    EXPECT_LE(r.eta, 1.0);
  }
}

TEST(Otsu, DegenerateHistogram) {
  std::vector<std::uint64_t> c(256, 0);
  c[17] = 40;
  EXPECT_THROW(otsu_threshold(from_counts(c)), DegenerateError);
}

TEST(ChannelSelect, Rule) {
  OtsuResult r;
  r.eta = 1.0;
  r.mass = {0.5, 0.5};
  EXPECT_TRUE(channel_select(r));
  r.eta = 0.3;
  EXPECT_FALSE(channel_select(r));
  r.eta = 0.9;
  r.mass = {0.005, 0.995};
  EXPECT_FALSE(channel_select(r));
  r.eta = 0.6;
  r.mass = {0.3, 0.7};
  EXPECT_TRUE(channel_select(r, {0.5, 0.02}));
  EXPECT_FALSE(channel_select(r));
}

TEST(ChannelSelect, UpperModeBelowMinimumIsRejected) {
  std::vector<std::uint64_t> c(256, 0);
  c[1] = 900;
  c[25] = 100;
  const Histogram low = from_counts(c);
  const OtsuResult r = otsu_threshold(low);
  EXPECT_NEAR(r.eta, 1.0, 1e-12);
  EXPECT_TRUE(channel_select(r));
  EXPECT_FALSE(channel_select(r, low));
  EXPECT_TRUE(channel_select(r, low, {0.8, 0.02, 0.05}));

  c[25] = 0;
  c[200] = 100;
  const Histogram high = from_counts(c);
  EXPECT_TRUE(channel_select(otsu_threshold(high), high));
  c[200] = 0;
  c[128] = 100;
  const Histogram edge = from_counts(c);
  EXPECT_TRUE(channel_select(otsu_threshold(edge), edge));
}

TEST(FindModes, PlateauPicksBinNearestThreshold) {
  std::vector<std::uint64_t> c(256, 0);
  c[10] = 5;
  c[20] = 5;
  c[150] = 9;
  c[240] = 9;
  EXPECT_EQ(find_modes(from_counts(c), 100), std::make_pair(20, 150));
  std::vector<std::uint64_t> one(256, 0);
  one[3] = 1;
  EXPECT_THROW(find_modes(from_counts(one), 100), DegenerateError);
}

TEST(RandomWalker, ThreePixelChain) {
  const Plane g(3, 1, 0.5);
  const SeedMap seeds = {0, -1, 1};
  const auto r = random_walker_seeded(g, seeds);
  EXPECT_DOUBLE_EQ(r.probability[0], 0.0);
  EXPECT_NEAR(r.probability[1], 0.5, 1e-9);
  EXPECT_DOUBLE_EQ(r.probability[2], 1.0);
}

TEST(RandomWalker, TwoRegions) {
  Plane g(20, 14, 0.1);
  for (int y = 0; y < 14; ++y) {
    for (int x = 0; x < 20; ++x) {
      if (x >= 7 + y / 3) g.at(x, y) = 0.9;
    }
  }
  SeedMap seeds(g.size(), -1);
  seeds[2 * 20 + 1] = 0;
  seeds[10 * 20 + 18] = 1;
  const BinaryMask m = binarize(random_walker_seeded(g, seeds).probability);
  for (int y = 0; y < 14; ++y) {
    for (int x = 0; x < 20; ++x) EXPECT_EQ(m.at(x, y), g.at(x, y) > 0.5) << x << "," << y;
  }
}

TEST(RandomWalker, MatchesDenseSolveOnSmallGrids) {
  std::mt19937_64 rng(12);
  for (int h = 1; h <= 8; ++h) {
    for (int w = 1; w <= 8; ++w) {
      if (w * h < 2) continue;
      const Plane g = test::random_plane(w, h, 1000 + w * 10 + h);
      SeedMap seeds(g.size(), -1);
      std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
      const std::size_t a = pick(rng);
      std::size_t b = pick(rng);
      while (b == a) b = pick(rng);
      seeds[a] = 0;
      seeds[b] = 1;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (seeds[i] < 0 && rng() % 5 == 0) seeds[i] = static_cast<std::int8_t>(rng() % 2);
      }
      const auto r = random_walker_seeded(g, seeds);
      const Plane d = oracle::dense_random_walker(g, seeds, 90.0);
      EXPECT_LT(test::max_abs_diff(r.probability, d), 1e-6) << w << "x" << h;
    }
  }
}

TEST(RandomWalker, HarmonicAndBounded) {
  const Plane g = test::random_plane(30, 20, 8);
  const auto r = random_walker(g, 60, 190);
  const SeedMap seeds = seeds_from_modes(g, 60, 190);
  const Plane& p = r.probability;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 30; ++x) {
      const double v = p.at(x, y);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      const std::int8_t s = seeds[static_cast<std::size_t>(y) * 30 + x];
      if (s >= 0) {
        EXPECT_EQ(v, s == 1 ? 1.0 : 0.0);
        continue;
      }
      double num = 0.0;
      double den = 0.0;
      const int dx[4] = {1, -1, 0, 0};
      const int dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k];
        const int ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= 30 || ny >= 20) continue;
        const double d = g.at(x, y) - g.at(nx, ny);
        const double wgt = std::exp(-90.0 * d * d) + 1e-6;
        num += wgt * p.at(nx, ny);
        den += wgt;
      }
      EXPECT_NEAR(v, num / den, 1e-6);
    }
  }
}

TEST(RandomWalker, SeedingFromModes) {
  const Plane g = test::random_plane(10, 10, 5, 0.4, 0.6);
  const SeedMap s = seeds_from_modes(g, 128, 140);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int expect = g[i] < 128.5 / 256 ? 0 : (g[i] > 140.5 / 256 ? 1 : -1);
    EXPECT_EQ(s[i], expect);
  }
  EXPECT_THROW(seeds_from_modes(g, 10, 140), SeedingError);
  EXPECT_THROW(seeds_from_modes(g, 128, 250), SeedingError);
}

TEST(Fusion, BinarizeAndOr) {
  const Plane p = test::random_plane(9, 7, 6);
  const BinaryMask m = binarize(p);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(m[i], p[i] > 0.5);
  const std::vector<BinaryMask> single = {m};
  EXPECT_EQ(combine_or(single), m);
  BinaryMask comp(9, 7);
  for (std::size_t i = 0; i < m.size(); ++i) comp.set(i, !m[i]);
  const std::vector<BinaryMask> both = {m, comp};
  EXPECT_EQ(combine_or(both).count(), m.size());

  std::vector<BinaryMask> masks;
  for (int k = 0; k < 4; ++k) masks.push_back(binarize(test::random_plane(9, 7, 60 + k), 0.8));
  const BinaryMask ref = combine_or(masks);
  std::vector<int> order = {0, 1, 2, 3};
  do {
    std::vector<BinaryMask> perm;
    for (int k : order) perm.push_back(masks[k]);
    EXPECT_EQ(combine_or(perm), ref);
  } while (std::next_permutation(order.begin(), order.end()));
  for (const auto& mk : masks) EXPECT_GE(ref.count(), mk.count());

  const std::vector<BinaryMask> mismatched = {m, BinaryMask(3, 3)};
  EXPECT_THROW(combine_or(mismatched), ShapeError);
  EXPECT_THROW(combine_or(std::vector<BinaryMask>{}), ParameterError);
}

TEST(Fusion, GrayMaskAndConfidence) {
  Plane g(2, 2);
  g[0] = 0.5;
  g[3] = 1.0;
  EXPECT_DOUBLE_EQ(confidence_score(g), 0.75);
  EXPECT_EQ(confidence_score(Plane(4, 4)), 0.0);
  EXPECT_EQ(confidence_score(Plane(4, 4, 1.0)), 1.0);

  const Plane none = gray_mask({}, 3, 2);
  EXPECT_EQ(none.width(), 3);
  EXPECT_EQ(confidence_score(none), 0.0);

  const std::vector<Plane> maps = {test::random_plane(5, 5, 1), test::random_plane(5, 5, 2)};
  const Plane mean = gray_mask(maps, 5, 5);
  for (std::size_t i = 0; i < mean.size(); ++i) EXPECT_NEAR(mean[i], (maps[0][i] + maps[1][i]) / 2, 1e-15);
  const double c = confidence_score(mean);
  EXPECT_GE(c, 0.0);
  EXPECT_LE(c, 1.0);
}

}  // namespace
}  // namespace rsf
