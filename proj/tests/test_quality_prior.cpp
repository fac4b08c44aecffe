#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cwvo/error.hpp"
#include "cwvo/quality_prior.hpp"
#include "test_support.hpp"

using namespace cwvo;

namespace {

ImageD random_log(int w, int h, std::mt19937_64& rng, double sigma = 1.5) {
  std::normal_distribution<double> n(-3.0, sigma);
  ImageD img(w, h);
  for (double& v : img.pixels()) v = n(rng);
  return img;
}

QualityMap random_quality(int w, int h, std::mt19937_64& rng, Branch b = Branch::kPhoto) {
  std::uniform_real_distribution<double> u(kQualityFloor, 1.0);
  QualityMap q{ImageD(w, h), b};
  for (double& v : q.values.pixels()) v = u(rng);
  return q;
}

}  // namespace

TEST(Median, OddAndEven) {
  EXPECT_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median_of({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_EQ(median_of({7.0}), 7.0);
  EXPECT_THROW((void)median_of({}), Error);
}

TEST(PairwiseQuality, ConstantLogIsExactlyOne) {
  for (double c : {-7.0, 0.0, 3.25}) {
    const QualityMap q = pairwise_quality(ImageD(6, 5, c), Branch::kGeo);
    EXPECT_EQ(q.branch, Branch::kGeo);
    for (double v : q.values.pixels()) EXPECT_EQ(v, 1.0);
  }
}

TEST(PairwiseQuality, DoubledVarianceGivesHalf) {
  ImageD l(5, 1, 0.0);
  l(4, 0) = std::log(2.0);
  EXPECT_NEAR(pairwise_quality(l, Branch::kPhoto).values(4, 0), 0.5, 1e-15);
}

TEST(PairwiseQuality, ClipsAtFloor) {
  ImageD l(5, 1, 0.0);
  l(0, 0) = std::log(1e6);
  l(1, 0) = -30.0;
  const QualityMap q = pairwise_quality(l, Branch::kPhoto);
  EXPECT_EQ(q.values(0, 0), kQualityFloor);
  EXPECT_EQ(q.values(1, 0), 1.0);
}

TEST(PairwiseQuality, ShiftInvariant) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ImageD l = random_log(17, 9, rng);
    const double c = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    ImageD shifted = l;
    for (double& v : shifted.pixels()) v += c;
    const QualityMap a = pairwise_quality(l, Branch::kPhoto);
    const QualityMap b = pairwise_quality(shifted, Branch::kPhoto);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
    }
  }
}

TEST(PairwiseQuality, MedianPixelMapsToOneAndBounds) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ImageD l = random_log(9, 7, rng);  // odd count: median is a pixel
    std::vector<double> sorted(l.pixels().begin(), l.pixels().end());
    std::sort(sorted.begin(), sorted.end());
    const double median_l = sorted[sorted.size() / 2];
    const QualityMap q = pairwise_quality(l, Branch::kPhoto);
    for (std::size_t i = 0; i < l.size(); ++i) {
      EXPECT_GE(q.values[i], kQualityFloor);
      EXPECT_LE(q.values[i], 1.0);
      if (l[i] == median_l) {
        EXPECT_EQ(q.values[i], 1.0);
      }
      // Pre-clip ratio checked against the definition.
      const double pre = std::exp(median_l) / std::exp(l[i]);
      EXPECT_NEAR(q.values[i], std::clamp(pre, kQualityFloor, 1.0), 1e-12);
    }
  }
}

TEST(PairwiseQuality, MonotoneInLog) {
  ImageD l(7, 1);
  for (int x = 0; x < 7; ++x) l(x, 0) = -2.0 + 0.7 * x;
  const QualityMap q = pairwise_quality(l, Branch::kPhoto);
  for (int x = 1; x < 7; ++x) EXPECT_LE(q.values(x, 0), q.values(x - 1, 0));
}

TEST(PairwiseQuality, RejectsNonFinite) {
  ImageD l(3, 3, 0.0);
  l(1, 1) = std::nan("");
  EXPECT_THROW((void)pairwise_quality(l, Branch::kPhoto), Error);
  EXPECT_THROW((void)pairwise_quality(ImageD(), Branch::kPhoto), Error);
}

TEST(Fuse, Examples) {
  QualityMap a{ImageD(2, 2, 1.0), Branch::kPhoto};
  QualityMap b{ImageD(2, 2, 0.25), Branch::kPhoto};
  {
    const QualityMap q = fuse_bidirectional(a, b);
    for (double v : q.values.pixels()) EXPECT_EQ(v, 0.5);
  }
  {
    const QualityMap q = fuse_bidirectional(b, b);
    for (double v : q.values.pixels()) EXPECT_EQ(v, 0.25);
  }
}

TEST(Fuse, SymmetryIdempotenceLogMean) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const QualityMap a = random_quality(13, 11, rng);
    const QualityMap b = random_quality(13, 11, rng);
    const QualityMap ab = fuse_bidirectional(a, b);
    const QualityMap ba = fuse_bidirectional(b, a);
    const QualityMap aa = fuse_bidirectional(a, a);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      EXPECT_NEAR(ab.values[i], ba.values[i], 1e-12);
      EXPECT_NEAR(aa.values[i], a.values[i], 1e-12);
      EXPECT_NEAR(std::log(ab.values[i]),
                  0.5 * (std::log(a.values[i]) + std::log(b.values[i])), 1e-12);
      EXPECT_GE(ab.values[i], kQualityFloor);
      EXPECT_LE(ab.values[i], 1.0);
    }
  }
}

TEST(Fuse, Mismatch) {
  QualityMap a{ImageD(2, 2, 1.0), Branch::kPhoto};
  QualityMap g{ImageD(2, 2, 1.0), Branch::kGeo};
  QualityMap c{ImageD(3, 2, 1.0), Branch::kPhoto};
  EXPECT_THROW((void)fuse_bidirectional(a, g), Error);
  EXPECT_THROW((void)fuse_bidirectional(a, c), Error);
}

TEST(Fuse, MonteCarloVarianceHalves) {
  // Log-quality observations mu + N(0, s^2) from the two flanking pairs; the
  // fused log-quality should have variance s^2 / 2.
  constexpr int kTrials = 100000;
  const double mu = -4.0;
  const double s = 0.5;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(mu, s);
  QualityMap prev{ImageD(kTrials, 1), Branch::kPhoto};
  QualityMap next{ImageD(kTrials, 1), Branch::kPhoto};
  for (int i = 0; i < kTrials; ++i) {
    prev.values[i] = std::exp(n(rng));
    next.values[i] = std::exp(n(rng));
  }
  const QualityMap fused = fuse_bidirectional(prev, next);
  const auto variance = [](const QualityMap& q) {
    double mean = 0.0;
    for (double v : q.values.pixels()) mean += std::log(v);
    mean /= q.values.size();
    double var = 0.0;
    for (double v : q.values.pixels()) var += (std::log(v) - mean) * (std::log(v) - mean);
    return var / (q.values.size() - 1);
  };
  const double single = variance(prev);
  const double ratio = variance(fused) / single;
  EXPECT_NEAR(ratio, 0.5, 0.5 * 0.05);
}

TEST(Prior, ProvisionalAndFinalize) {
  std::mt19937_64 rng(5);
  const QualityMap p = random_quality(6, 4, rng, Branch::kPhoto);
  const QualityMap g = random_quality(6, 4, rng, Branch::kGeo);
  const QualityPrior prov = provisional_prior(p, g, 12);
  EXPECT_FALSE(prov.finalized);
  EXPECT_EQ(prov.host_id, 12);
  EXPECT_EQ(prov.photo.values, p.values);
  EXPECT_EQ(prov.geo.values, g.values);

  const QualityPrior same = finalize_prior(prov, p, g);
  EXPECT_TRUE(same.finalized);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    EXPECT_NEAR(same.photo.values[i], p.values[i], 1e-15);
  }

  const QualityMap p2 = random_quality(6, 4, rng, Branch::kPhoto);
  const QualityMap g2 = random_quality(6, 4, rng, Branch::kGeo);
  const QualityPrior fin = finalize_prior(prov, p2, g2);
  EXPECT_EQ(fin.photo.values, fuse_bidirectional(p, p2).values);
  EXPECT_EQ(fin.geo.values, fuse_bidirectional(g, g2).values);

  EXPECT_THROW((void)provisional_prior(g, p, 0), Error);
}

TEST(Weights, Formula) {
  QualityPrior prior = unit_prior(3, 2, 0);
  prior.photo.values(0, 0) = kQualityFloor;
  const WeightMaps w = weights_from_prior(prior);
  EXPECT_DOUBLE_EQ(w.photo(1, 1), std::sqrt(1.0001));
  EXPECT_DOUBLE_EQ(w.geo(0, 0), std::sqrt(1.0001));
  EXPECT_NEAR(w.photo(0, 0), 0.0141421356, 1e-9);

  std::mt19937_64 rng(6);
  QualityPrior r{random_quality(8, 8, rng, Branch::kPhoto), random_quality(8, 8, rng, Branch::kGeo),
                 1, true};
  const WeightMaps wr = weights_from_prior(r);
  for (std::size_t i = 0; i < wr.photo.size(); ++i) {
    EXPECT_NEAR(wr.photo[i] * wr.photo[i] - kWeightEpsilon, r.photo.values[i], 1e-12);
    EXPECT_GE(wr.geo[i], 0.01);
    EXPECT_LE(wr.geo[i], std::sqrt(1.0 + kWeightEpsilon));
  }
}
