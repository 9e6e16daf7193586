#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "rankup/basis.hpp"
#include "rankup/cholesky.hpp"
#include "rankup/costmodel.hpp"
#include "rankup/error.hpp"
#include "rankup/flops.hpp"
#include "rankup/method.hpp"

namespace rankup {

// Sherman-Morrison denominators at or below this magnitude are rejected.
inline constexpr double kSingularDenominator = 1e-12;

namespace detail {

inline void check_update_shapes(const Matrix& m, const Matrix& X, const char* who) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::shape_mismatch, std::string(who) + ": matrix is not square");
  }
  if (X.rows() == 0) throw Error(Errc::empty_batch, std::string(who) + ": empty batch");
  if (X.cols() != m.rows()) {
    throw Error(Errc::shape_mismatch, std::string(who) + ": batch has " +
                                          std::to_string(X.cols()) + " columns, matrix is " +
                                          std::to_string(m.rows()) + " wide");
  }
}

}  // namespace detail

// Direct inversion. m_raw <- m_raw + X^T X, returns its inverse.
// Charges 2ks^2 for the sum plus the inversion count.
inline Matrix di_update_inplace(Matrix& m_raw, const Matrix& X, FlopLedger& ledger) {
  detail::check_update_shapes(m_raw, X, "di_update");
  const auto s = static_cast<std::uint64_t>(m_raw.rows());
  const auto k = static_cast<std::uint64_t>(X.rows());
  m_raw.noalias() += X.transpose() * X;
  ledger.add(elem::mat_mat(s, k, s) + elem::mat_add(s, s));
  Matrix inverse = m_raw;
  spd_invert_inplace(inverse, ledger);
  return inverse;
}

inline Matrix di_update(Matrix m_raw, const Matrix& X, FlopLedger& ledger) {
  return di_update_inplace(m_raw, X, ledger);
}

// Iterative Sherman-Morrison: one symmetric rank-1 correction per row of X,
// in row order. Charges exactly 4ks^2 + 2ks.
inline void ism_update_inplace(Matrix& m_inv, const Matrix& X, FlopLedger& ledger) {
  detail::check_update_shapes(m_inv, X, "ism_update");
  const auto s = static_cast<std::uint64_t>(m_inv.rows());
  Vector v(m_inv.rows());
  Vector l(m_inv.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    v = X.row(i).transpose();
    l.noalias() = m_inv * v;  // M^{-1} v == (v^T M^{-1})^T by symmetry
    const double denominator = 1.0 + v.dot(l);
    ledger.add(elem::mat_colvec(s, s) + elem::row_col(s) + 1);
    if (!(std::abs(denominator) > kSingularDenominator)) {
      throw Error(Errc::singular_update,
                  "Sherman-Morrison denominator " + std::to_string(denominator) + " at row " +
                      std::to_string(i));
    }
    v = l / denominator;  // v now holds l_d
    m_inv.noalias() -= v * l.transpose();
    ledger.add(s + elem::col_row(s, s) + elem::mat_add(s, s));
  }
}

inline Matrix ism_update(Matrix m_inv, const Matrix& X, FlopLedger& ledger) {
  ism_update_inplace(m_inv, X, ledger);
  return m_inv;
}

// Woodbury: M^{-1} - M^{-1} X^T (I + X M^{-1} X^T)^{-1} X M^{-1} with
// R = X M^{-1} reused as (M^{-1} X^T)^T. Charges 4ks^2 + (4k^2 - 2k)s plus
// the k x k inversion count.
inline void wmi_update_inplace(Matrix& m_inv, const Matrix& X, FlopLedger& ledger) {
  detail::check_update_shapes(m_inv, X, "wmi_update");
  const auto s = static_cast<std::uint64_t>(m_inv.rows());
  const auto k = static_cast<std::uint64_t>(X.rows());

  Matrix R;
  R.noalias() = X * m_inv;
  ledger.add(elem::mat_mat(k, s, s));

  Matrix inner = Matrix::Identity(X.rows(), X.rows());
  inner.noalias() += R * X.transpose();
  ledger.add(elem::mat_mat(k, s, k) + elem::mat_add(k, k));

  spd_invert_inplace(inner, ledger);

  Matrix Q;
  Q.noalias() = R.transpose() * inner;
  ledger.add(elem::mat_mat(s, k, k));

  m_inv.noalias() -= Q * R;
  ledger.add(elem::mat_mat(s, k, s) + elem::mat_add(s, s));
}

inline Matrix wmi_update(Matrix m_inv, const Matrix& X, FlopLedger& ledger) {
  wmi_update_inplace(m_inv, X, ledger);
  return m_inv;
}

// Resolves the method for a rank-k update of an s x s inverse.
// EXPERIMENTAL: ISM for k = 1, WMI for 2 <= k <= floor(s/3), DI beyond.
// THEORETICAL: cheapest closed-form FLOP count.
inline UpdateMethod select_method(std::size_t s, std::size_t k,
                                  SelectionRule rule = SelectionRule::EXPERIMENTAL) {
  if (rule == SelectionRule::THEORETICAL) return cost::theoretical_best(s, k);
  if (k <= 1) return UpdateMethod::ISM;
  if (k <= s / 3) return UpdateMethod::WMI;
  return UpdateMethod::DI;
}

}  // namespace rankup
