// Fits a degree-4 model on a 2-D Gaussian cloud, then streams a few points
// through a detector that learns from inliers in batches of 8.

#include <iostream>
#include <random>
#include <vector>

#include "rankup/rankup.hpp"

int main() {
  using namespace rankup;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> train;
  for (int i = 0; i < 500 * 2; ++i) train.push_back(gauss(rng));
  auto basis = std::make_shared<const MonomialBasis>(2, 4);
  MomentState state = fit(std::span<const double>(train), basis);

  DetectorConfig config;
  config.d = 2;
  config.n = 4;
  config.batch_size = 8;
  Detector detector(std::move(state), config);

  for (int i = 0; i < 40; ++i) {
    std::vector<double> x{gauss(rng), gauss(rng)};
    if (i % 10 == 9) x = {6.0 + i * 0.1, -5.0};
    const ScoreReport r = detector.stream_step(x);
    std::cout << i << ": (" << x[0] << ", " << x[1] << ") score=" << r.score
              << (r.is_outlier ? "  OUTLIER" : "") << '\n';
  }
  std::cout << "updates applied: " << detector.updates() << ", N = " << detector.state().count()
            << ", flops = " << detector.ledger().count() << '\n';
}
