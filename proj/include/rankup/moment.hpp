#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "rankup/basis.hpp"
#include "rankup/cholesky.hpp"
#include "rankup/error.hpp"
#include "rankup/flops.hpp"
#include "rankup/method.hpp"
#include "rankup/update.hpp"

namespace rankup {

struct FitOptions {
  double ridge = 0.0;          // lambda added to the normalized moment matrix
  bool track_matrix = false;   // keep M_n(mu_N) so DI updates are possible
  std::uint32_t resymmetrize_every = 0;  // (A + A^T)/2 every T updates; 0 = never
};

// Streaming summary of a point cloud: the normalized inverse moment matrix
// M_n(mu_N)^{-1} = (1/N sum v v^T + lambda I)^{-1} and, optionally, M_n itself.
//
// The ridge lives inside the denormalized sum, so after an update it carries
// weight N/(N+k): `ridge()` always reports the lambda currently in effect.
class MomentState {
 public:
  MomentState(std::shared_ptr<const MonomialBasis> basis, std::uint64_t count, Matrix inverse,
              std::optional<Matrix> matrix, double ridge, std::uint32_t resymmetrize_every = 0)
      : basis_(std::move(basis)),
        count_(count),
        inverse_(std::move(inverse)),
        matrix_(std::move(matrix)),
        ridge_(ridge),
        resymmetrize_every_(resymmetrize_every) {
    if (!basis_) throw Error(Errc::invalid_dimension, "moment state needs a basis");
    const auto s = static_cast<Eigen::Index>(basis_->size());
    if (inverse_.rows() != s || inverse_.cols() != s) {
      throw Error(Errc::shape_mismatch, "inverse does not match the basis size");
    }
    if (matrix_ && (matrix_->rows() != s || matrix_->cols() != s)) {
      throw Error(Errc::shape_mismatch, "matrix does not match the basis size");
    }
  }

  [[nodiscard]] const MonomialBasis& basis() const noexcept { return *basis_; }
  [[nodiscard]] std::shared_ptr<const MonomialBasis> basis_ptr() const noexcept { return basis_; }
  [[nodiscard]] std::size_t size() const noexcept { return basis_->size(); }
  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  [[nodiscard]] const Matrix& inverse() const noexcept { return inverse_; }
  [[nodiscard]] const std::optional<Matrix>& matrix() const noexcept { return matrix_; }
  [[nodiscard]] bool tracks_matrix() const noexcept { return matrix_.has_value(); }
  [[nodiscard]] double ridge() const noexcept { return ridge_; }
  [[nodiscard]] std::uint32_t resymmetrize_every() const noexcept { return resymmetrize_every_; }
  [[nodiscard]] std::uint64_t updates_applied() const noexcept { return updates_; }

 private:
  friend MomentState apply_update(const MomentState&, const Matrix&, UpdateMethod, FlopLedger&);

  std::shared_ptr<const MonomialBasis> basis_;
  std::uint64_t count_;
  Matrix inverse_;
  std::optional<Matrix> matrix_;
  double ridge_;
  std::uint32_t resymmetrize_every_;
  std::uint64_t updates_ = 0;
};

// Fit on a precomputed k x s design matrix.
inline MomentState fit_design(std::shared_ptr<const MonomialBasis> basis, const Matrix& X,
                              const FitOptions& options = {}) {
  const auto s = static_cast<Eigen::Index>(basis->size());
  if (X.cols() != s) throw Error(Errc::shape_mismatch, "design matrix width differs from basis size");
  if (options.ridge < 0.0) throw Error(Errc::invalid_config, "ridge must be non-negative");
  const auto N = static_cast<std::uint64_t>(X.rows());
  if (N == 0) throw Error(Errc::empty_batch, "cannot fit on zero points");
  if (N <= static_cast<std::uint64_t>(s) && options.ridge == 0.0) {
    throw Error(Errc::rank_deficient, "need more than s = " + std::to_string(s) +
                                          " points to invert the moment matrix, got " +
                                          std::to_string(N));
  }
  Matrix M = Matrix::Zero(s, s);
  M.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / static_cast<double>(N));
  M.diagonal().array() += options.ridge;
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
  Matrix inverse = M;
  FlopLedger scratch;
  spd_invert_inplace(inverse, scratch);
  std::optional<Matrix> kept;
  if (options.track_matrix) kept = std::move(M);
  return MomentState(std::move(basis), N, std::move(inverse), std::move(kept), options.ridge,
                     options.resymmetrize_every);
}

// points is row-major N x d.
inline MomentState fit(std::span<const double> points, std::shared_ptr<const MonomialBasis> basis,
                       const FitOptions& options = {}) {
  const Matrix X = basis->vectorize_batch(points);
  return fit_design(std::move(basis), X, options);
}

inline MomentState fit(const std::vector<std::vector<double>>& points,
                       std::shared_ptr<const MonomialBasis> basis, const FitOptions& options = {}) {
  const Matrix X = basis->vectorize_batch(points);
  return fit_design(std::move(basis), X, options);
}

// Step (i): N * M_n(mu_N).
inline Matrix denormalize_matrix(const MomentState& state) {
  if (state.count() == 0) throw Error(Errc::empty_state, "state has no samples");
  if (!state.tracks_matrix()) throw Error(Errc::missing_matrix, "state does not keep M_n(mu_N)");
  return *state.matrix() * static_cast<double>(state.count());
}

// Step (i): M_n(mu_N)^{-1} / N.
inline Matrix denormalize_inverse(const MomentState& state) {
  if (state.count() == 0) throw Error(Errc::empty_state, "state has no samples");
  return state.inverse() / static_cast<double>(state.count());
}

// Step (iii): inverse of the updated raw sum times (N + k).
inline Matrix renormalize(const Matrix& updated_inverse, std::uint64_t count, std::uint64_t k) {
  if (updated_inverse.rows() != updated_inverse.cols()) {
    throw Error(Errc::shape_mismatch, "renormalize needs a square matrix");
  }
  return updated_inverse * static_cast<double>(count + k);
}

// Resolves AUTO for a given state. DI needs the tracked matrix; without it the
// WMI kernel takes DI's place.
inline UpdateMethod resolve_method(const MomentState& state, std::size_t k, UpdateMethod method,
                                   SelectionRule rule = SelectionRule::EXPERIMENTAL) {
  if (method != UpdateMethod::AUTO) return method;
  const UpdateMethod chosen = select_method(state.size(), k, rule);
  if (chosen == UpdateMethod::DI && !state.tracks_matrix()) return UpdateMethod::WMI;
  return chosen;
}

// Denormalize, run the chosen rank-k kernel on the k x s batch X, renormalize.
inline MomentState apply_update(const MomentState& state, const Matrix& X, UpdateMethod method,
                                FlopLedger& ledger) {
  if (X.rows() == 0) throw Error(Errc::empty_batch, "update batch is empty");
  if (X.cols() != static_cast<Eigen::Index>(state.size())) {
    throw Error(Errc::shape_mismatch, "batch width differs from basis size");
  }
  const auto k = static_cast<std::uint64_t>(X.rows());
  const std::uint64_t N = state.count();
  const std::uint64_t total = N + k;
  method = resolve_method(state, X.rows(), method);

  MomentState next = state;
  switch (method) {
    case UpdateMethod::DI: {
      Matrix raw = denormalize_matrix(state);
      Matrix raw_inverse = di_update_inplace(raw, X, ledger);
      next.inverse_ = renormalize(raw_inverse, N, k);
      next.matrix_ = raw / static_cast<double>(total);
      break;
    }
    case UpdateMethod::ISM:
    case UpdateMethod::WMI: {
      Matrix raw_inverse = denormalize_inverse(state);
      if (method == UpdateMethod::ISM) {
        ism_update_inplace(raw_inverse, X, ledger);
      } else {
        wmi_update_inplace(raw_inverse, X, ledger);
      }
      next.inverse_ = renormalize(raw_inverse, N, k);
      if (state.tracks_matrix()) {
        Matrix raw = denormalize_matrix(state);
        raw.noalias() += X.transpose() * X;
        next.matrix_ = raw / static_cast<double>(total);
      }
      break;
    }
    case UpdateMethod::AUTO: break;  // resolved above
  }
  next.count_ = total;
  next.ridge_ = state.ridge() * static_cast<double>(N) / static_cast<double>(total);
  ++next.updates_;
  if (next.resymmetrize_every_ != 0 && next.updates_ % next.resymmetrize_every_ == 0) {
    Matrix sym = 0.5 * (next.inverse_ + next.inverse_.transpose());
    next.inverse_ = std::move(sym);
  }
  return next;
}

inline MomentState apply_update(const MomentState& state, const Matrix& X, UpdateMethod method) {
  FlopLedger scratch;
  return apply_update(state, X, method, scratch);
}

// Relative Frobenius asymmetry ||A - A^T|| / ||A||.
inline double asymmetry(const Matrix& a) {
  const double norm = a.norm();
  return norm == 0.0 ? 0.0 : (a - a.transpose()).norm() / norm;
}

}  // namespace rankup
