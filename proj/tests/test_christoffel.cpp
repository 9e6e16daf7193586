#include <gtest/gtest.h>

#include <random>

#include "rankup/christoffel.hpp"
#include "support/oracles.hpp"

using namespace rankup;

namespace {

std::vector<double> gaussian_points(std::uint64_t seed, std::size_t count, std::size_t d) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> pts(count * d);
  for (auto& p : pts) p = g(rng);
  return pts;
}

}  // namespace

// Without ridge, the training mean of q equals trace(M^{-1} M) = s.
TEST(InverseCf, TrainingMeanIsBasisSize) {
  auto basis = std::make_shared<const MonomialBasis>(2, 3);
  const auto pts = gaussian_points(1, 500, 2);
  const MomentState st = fit(std::span<const double>(pts), basis);
  double sum = 0.0;
  for (std::size_t i = 0; i < 500; ++i) sum += inverse_cf(st, std::span<const double>(pts).subspan(2 * i, 2));
  EXPECT_NEAR(sum / 500.0, static_cast<double>(basis->size()), 1e-9);
}

TEST(InverseCf, ConstantBasis) {
  auto basis = std::make_shared<const MonomialBasis>(1, 0);
  const std::vector<double> pts{0.3, -2.0, 5.0};
  const MomentState st = fit(std::span<const double>(pts), basis);
  const std::vector<double> x{123.0};
  const ScoreReport r = score(st, x, DetectorConfig{.d = 1, .n = 0});
  EXPECT_DOUBLE_EQ(r.inverse_cf, 1.0);
  EXPECT_DOUBLE_EQ(r.score, 1.0);
  EXPECT_TRUE(r.is_outlier);
}

TEST(Score, BoundaryAndGamma) {
  EXPECT_TRUE(score_value(2.0, 2.0).is_outlier);
  EXPECT_FALSE(score_value(std::nextafter(2.0, 0.0), 2.0).is_outlier);
  EXPECT_DOUBLE_EQ(score_value(3.0, 6.0).score, 0.5);
  EXPECT_DOUBLE_EQ(score_value(3.0, 12.0).score, 0.25);
}

TEST(Score, FarPointIsOutlierCentreIsNot) {
  auto basis = std::make_shared<const MonomialBasis>(2, 4);
  const auto pts = gaussian_points(2, 2000, 2);
  const MomentState st = fit(std::span<const double>(pts), basis);
  const DetectorConfig config{.d = 2, .n = 4};
  EXPECT_TRUE(score(st, std::vector<double>{10.0, 0.0}, config).is_outlier);
  EXPECT_GT(score(st, std::vector<double>{10.0, 0.0}, config).score, 100.0);
  EXPECT_FALSE(score(st, std::vector<double>{0.1, -0.1}, config).is_outlier);
}

TEST(Score, InvalidGamma) {
  auto basis = std::make_shared<const MonomialBasis>(1, 1);
  const auto pts = gaussian_points(3, 10, 1);
  const MomentState st = fit(std::span<const double>(pts), basis);
  try {
    (void)score(st, std::vector<double>{0.0}, DetectorConfig{.d = 1, .n = 1, .gamma = 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_config);
  }
}

TEST(Detector, ConfigMustMatchBasis) {
  auto basis = std::make_shared<const MonomialBasis>(2, 2);
  const auto pts = gaussian_points(4, 50, 2);
  const MomentState st = fit(std::span<const double>(pts), basis);
  EXPECT_THROW(Detector(st, DetectorConfig{.d = 2, .n = 3}), Error);
  EXPECT_THROW(Detector(st, DetectorConfig{.d = 2, .n = 2, .batch_size = 0}), Error);
  const Detector det(st, DetectorConfig{.d = 2, .n = 2});
  EXPECT_DOUBLE_EQ(det.gamma(), 6.0);
}

TEST(Detector, NeverPolicyLeavesStateUntouched) {
  auto basis = std::make_shared<const MonomialBasis>(2, 2);
  const auto pts = gaussian_points(5, 80, 2);
  const MomentState st = fit(std::span<const double>(pts), basis);
  Detector det(st, DetectorConfig{.d = 2, .n = 2, .learn_policy = LearnPolicy::NEVER});
  const auto stream = gaussian_points(6, 30, 2);
  for (std::size_t i = 0; i < 30; ++i) (void)det.stream_step(std::span<const double>(stream).subspan(2 * i, 2));
  det.flush();
  EXPECT_EQ(det.state().inverse(), st.inverse());
  EXPECT_EQ(det.state().count(), 80u);
  EXPECT_EQ(det.updates(), 0u);
}

TEST(Detector, InliersOnlySkipsOutliers) {
  auto basis = std::make_shared<const MonomialBasis>(1, 2);
  const auto pts = gaussian_points(7, 200, 1);
  const MomentState st = fit(std::span<const double>(pts), basis);
  Detector det(st, DetectorConfig{.d = 1, .n = 2});
  EXPECT_TRUE(det.stream_step(std::vector<double>{50.0}).is_outlier);
  EXPECT_EQ(det.state().count(), 200u);
  EXPECT_FALSE(det.stream_step(std::vector<double>{0.0}).is_outlier);
  EXPECT_EQ(det.state().count(), 201u);
}

TEST(Detector, SingleRowBatchesUseIsm) {
  auto basis = std::make_shared<const MonomialBasis>(2, 2);
  const auto pts = gaussian_points(8, 60, 2);
  Detector det(fit(std::span<const double>(pts), basis),
               DetectorConfig{.d = 2, .n = 2, .learn_policy = LearnPolicy::ALWAYS});
  (void)det.stream_step(std::vector<double>{0.5, 0.5});
  ASSERT_TRUE(det.last_method().has_value());
  EXPECT_EQ(*det.last_method(), UpdateMethod::ISM);
  EXPECT_EQ(det.ledger().count(), 4u * 36 + 2 * 6);
}

TEST(Detector, BatchesBufferUntilFull) {
  auto basis = std::make_shared<const MonomialBasis>(2, 3);
  const auto pts = gaussian_points(9, 100, 2);
  Detector det(fit(std::span<const double>(pts), basis),
               DetectorConfig{.d = 2, .n = 3, .learn_policy = LearnPolicy::ALWAYS, .batch_size = 3});
  const auto stream = gaussian_points(10, 7, 2);
  for (std::size_t i = 0; i < 7; ++i) (void)det.stream_step(std::span<const double>(stream).subspan(2 * i, 2));
  EXPECT_EQ(det.updates(), 2u);
  EXPECT_EQ(det.pending_count(), 1u);
  EXPECT_EQ(*det.last_method(), UpdateMethod::WMI);  // 2 <= 3 <= floor(10/3)
  det.flush();
  EXPECT_EQ(det.updates(), 3u);
  EXPECT_EQ(det.state().count(), 107u);
}

// Streaming everything with ALWAYS ends where a single refit on all points does.
TEST(Detector, StreamingMatchesRefit) {
  auto basis = std::make_shared<const MonomialBasis>(2, 3);
  const std::size_t d = 2;
  const auto all = gaussian_points(11, 400, d);
  const std::span<const double> view(all);
  for (std::size_t batch : {1u, 4u, 25u}) {
    Detector det(fit(view.subspan(0, 150 * d), basis),
                 DetectorConfig{.d = d, .n = 3, .learn_policy = LearnPolicy::ALWAYS, .batch_size = batch});
    for (std::size_t i = 150; i < 400; ++i) (void)det.stream_step(view.subspan(i * d, d));
    det.flush();
    const MomentState refit = fit(view, basis);
    EXPECT_EQ(det.state().count(), 400u);
    EXPECT_LE(oracle::rel_frob(det.state().inverse(), refit.inverse()), 1e-7) << batch;
  }
}
