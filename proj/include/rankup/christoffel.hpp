#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankup/moment.hpp"

namespace rankup {

enum class LearnPolicy { ALWAYS, INLIERS_ONLY, NEVER };

inline std::optional<LearnPolicy> parse_policy(std::string_view text) {
  if (text == "always") return LearnPolicy::ALWAYS;
  if (text == "inliers") return LearnPolicy::INLIERS_ONLY;
  if (text == "never") return LearnPolicy::NEVER;
  return std::nullopt;
}

struct DetectorConfig {
  std::size_t d = 1;
  std::size_t n = 1;
  // Level set gamma_{n,d}; unset means s_d(n), the training mean of the
  // inverse Christoffel function.
  std::optional<double> gamma;
  LearnPolicy learn_policy = LearnPolicy::INLIERS_ONLY;
  std::size_t batch_size = 1;
  UpdateMethod method = UpdateMethod::AUTO;
  SelectionRule rule = SelectionRule::EXPERIMENTAL;
};

struct ScoreReport {
  double inverse_cf = 0.0;
  double score = 0.0;
  bool is_outlier = false;
};

// v_n(x)^T M_n(mu_N)^{-1} v_n(x), the reciprocal of the empirical
// Christoffel function.
inline double inverse_cf(const MomentState& state, std::span<const double> x) {
  if (state.count() == 0) throw Error(Errc::empty_state, "state has no samples");
  const Vector v = state.basis().vectorize(x);
  return v.dot(state.inverse() * v);
}

inline ScoreReport score_value(double q, double gamma) {
  ScoreReport report;
  report.inverse_cf = q;
  report.score = q / gamma;
  report.is_outlier = report.score >= 1.0;
  return report;
}

inline double resolve_gamma(const MomentState& state, const std::optional<double>& gamma) {
  const double g = gamma.value_or(static_cast<double>(state.size()));
  if (!(g > 0.0)) throw Error(Errc::invalid_config, "gamma must be positive");
  return g;
}

inline ScoreReport score(const MomentState& state, std::span<const double> x,
                         const DetectorConfig& config) {
  return score_value(inverse_cf(state, x), resolve_gamma(state, config.gamma));
}

// Scores a stream and learns from it in rank-k batches.
class Detector {
 public:
  Detector(MomentState state, DetectorConfig config)
      : state_(std::move(state)), config_(std::move(config)) {
    if (config_.d != state_.basis().dimension() || config_.n != state_.basis().degree()) {
      throw Error(Errc::shape_mismatch, "detector config (d, n) differs from the state's basis");
    }
    if (config_.batch_size == 0) throw Error(Errc::invalid_config, "batch size must be >= 1");
    gamma_ = resolve_gamma(state_, config_.gamma);
  }

  // Scores x against the current state, then buffers it for learning per the
  // policy; a full buffer triggers one rank-k update.
  ScoreReport stream_step(std::span<const double> x) {
    const ScoreReport report = score_value(inverse_cf(state_, x), gamma_);
    const bool learn = config_.learn_policy == LearnPolicy::ALWAYS ||
                       (config_.learn_policy == LearnPolicy::INLIERS_ONLY && !report.is_outlier);
    if (learn) {
      pending_.insert(pending_.end(), x.begin(), x.end());
      if (pending_count() >= config_.batch_size) flush();
    }
    return report;
  }

  // Learns whatever is buffered, even if the batch is not full.
  void flush() {
    if (pending_.empty()) return;
    const Matrix X = state_.basis().vectorize_batch(std::span<const double>(pending_));
    last_method_ = resolve_method(state_, static_cast<std::size_t>(X.rows()), config_.method,
                                  config_.rule);
    state_ = apply_update(state_, X, *last_method_, ledger_);
    ++updates_;
    pending_.clear();
  }

  [[nodiscard]] const MomentState& state() const noexcept { return state_; }
  [[nodiscard]] const DetectorConfig& config() const noexcept { return config_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] std::size_t pending_count() const noexcept {
    return pending_.size() / config_.d;
  }
  [[nodiscard]] std::size_t updates() const noexcept { return updates_; }
  [[nodiscard]] std::optional<UpdateMethod> last_method() const noexcept { return last_method_; }
  [[nodiscard]] const FlopLedger& ledger() const noexcept { return ledger_; }

 private:
  MomentState state_;
  DetectorConfig config_;
  double gamma_ = 1.0;
  std::vector<double> pending_;
  std::size_t updates_ = 0;
  std::optional<UpdateMethod> last_method_;
  FlopLedger ledger_;
};

}  // namespace rankup
