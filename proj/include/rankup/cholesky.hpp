#pragma once

// Blocked Cholesky-based inversion of a symmetric positive definite matrix.
//
// Three in-place phases on the lower triangle, in the LAPACK potrf/trtri/lauum
// arrangement: A = L L^T, L -> L^{-1}, L^{-1} -> L^{-T} L^{-1} = A^{-1}. The
// off-diagonal block work goes through Eigen's triangular and general
// products; diagonal blocks use scalar loops. Every phase charges the ledger
// with the exact operation count of the scalar algorithm, which blocking does
// not change: n^3/3 + n^2/2 + n/6, n^3/3 + 2n/3 and n^3/3 + n^2/2 + n/6.

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "rankup/basis.hpp"
#include "rankup/error.hpp"
#include "rankup/flops.hpp"

namespace rankup {

inline constexpr Eigen::Index kCholeskyBlock = 96;

namespace detail {

using Index = Eigen::Index;
using Block = Eigen::Ref<Matrix>;

inline std::uint64_t u64(Index v) { return static_cast<std::uint64_t>(v); }

// Unblocked lower Cholesky of a (diagonal block starting at global row `offset`).
inline void factor_unblocked(Block a, Index offset, FlopLedger& ledger) {
  const Index n = a.rows();
  for (Index c = 0; c < n; ++c) {
    double diag = a(c, c);
    for (Index t = 0; t < c; ++t) diag -= a(c, t) * a(c, t);
    if (!(diag > 0.0) || !std::isfinite(diag)) throw NotPositiveDefinite(offset + c);
    const double pivot = std::sqrt(diag);
    a(c, c) = pivot;
    for (Index r = c + 1; r < n; ++r) {
      double v = a(r, c);
      for (Index t = 0; t < c; ++t) v -= a(r, t) * a(c, t);
      a(r, c) = v / pivot;
    }
  }
  ledger.add(inversion_cost::factor(u64(n)));
}

// Lower triangle of a <- its own inverse, column by column from the right.
inline void triangular_inverse_unblocked(Block a, FlopLedger& ledger) {
  const Index n = a.rows();
  for (Index c = n - 1; c >= 0; --c) {
    a(c, c) = 1.0 / a(c, c);
    const double scale = -a(c, c);
    const Index p = n - c - 1;
    if (p > 0) {
      auto x = a.col(c).tail(p);
      // x <- T x with T the already-inverted trailing triangle; rows bottom-up
      // so each x(t), t < r, is still the original value when row r reads it.
      for (Index r = p - 1; r >= 0; --r) {
        double acc = a(c + 1 + r, c + 1 + r) * x(r);
        for (Index t = 0; t < r; ++t) acc += a(c + 1 + r, c + 1 + t) * x(t);
        x(r) = acc * scale;
      }
    }
  }
  ledger.add(inversion_cost::triangular_inverse(u64(n)));
}

// Lower triangle of a <- L^T L for L the lower triangle of a.
inline void triangular_product_unblocked(Block a, FlopLedger& ledger) {
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    const double aii = a(i, i);
    const Index below = n - i - 1;
    for (Index c = 0; c < i; ++c) {
      double acc = aii * a(i, c);
      for (Index t = 1; t <= below; ++t) acc += a(i + t, i) * a(i + t, c);
      a(i, c) = acc;
    }
    double diag = aii * aii;
    for (Index t = 1; t <= below; ++t) diag += a(i + t, i) * a(i + t, i);
    a(i, i) = diag;
  }
  ledger.add(inversion_cost::triangular_product(u64(n)));
}

inline void factor_blocked(Block a, FlopLedger& ledger, Index nb) {
  const Index n = a.rows();
  for (Index j = 0; j < n; j += nb) {
    const Index jb = std::min(nb, n - j);
    factor_unblocked(a.block(j, j, jb, jb), j, ledger);
    const Index m = n - j - jb;
    if (m == 0) continue;
    auto l11 = a.block(j, j, jb, jb);
    auto a21 = a.block(j + jb, j, m, jb);
    // A21 <- A21 L11^{-T}
    l11.transpose().template triangularView<Eigen::Upper>().template solveInPlace<Eigen::OnTheRight>(a21);
    ledger.add(u64(m) * u64(jb) * u64(jb));
    // A22 <- A22 - A21 A21^T, lower triangle
    a.block(j + jb, j + jb, m, m).template selfadjointView<Eigen::Lower>().rankUpdate(a21, -1.0);
    ledger.add(u64(m) * u64(m + 1) * u64(jb));
  }
}

inline void triangular_inverse_blocked(Block a, FlopLedger& ledger, Index nb) {
  const Index n = a.rows();
  Matrix work;
  for (Index j = ((n - 1) / nb) * nb; j >= 0; j -= nb) {
    const Index jb = std::min(nb, n - j);
    const Index m = n - j - jb;
    if (m > 0) {
      auto b = a.block(j + jb, j, m, jb);
      // B <- -inv(T22) B inv(L11), where T22 is already inverted.
      work.noalias() = a.block(j + jb, j + jb, m, m).template triangularView<Eigen::Lower>() * b;
      ledger.add(u64(m) * u64(m) * u64(jb));
      a.block(j, j, jb, jb).template triangularView<Eigen::Lower>().template solveInPlace<Eigen::OnTheRight>(work);
      ledger.add(u64(m) * u64(jb) * u64(jb));
      b = -work;
    }
    triangular_inverse_unblocked(a.block(j, j, jb, jb), ledger);
  }
}

inline void triangular_product_blocked(Block a, FlopLedger& ledger, Index nb) {
  const Index n = a.rows();
  Matrix work;
  for (Index i = 0; i < n; i += nb) {
    const Index ib = std::min(nb, n - i);
    const Index m = n - i - ib;
    if (i > 0) {
      auto row = a.block(i, 0, ib, i);
      work.noalias() = a.block(i, i, ib, ib).transpose().template triangularView<Eigen::Upper>() * row;
      row = work;
      ledger.add(u64(ib) * u64(ib) * u64(i));
    }
    triangular_product_unblocked(a.block(i, i, ib, ib), ledger);
    if (m > 0) {
      auto a21 = a.block(i + ib, i, m, ib);
      if (i > 0) {
        a.block(i, 0, ib, i).noalias() += a21.transpose() * a.block(i + ib, 0, m, i);
        ledger.add(2 * u64(m) * u64(ib) * u64(i));
      }
      a.block(i, i, ib, ib).template selfadjointView<Eigen::Lower>().rankUpdate(a21.transpose(), 1.0);
      ledger.add(u64(ib) * u64(ib + 1) * u64(m));
    }
  }
}

inline void mirror_lower(Block a) {
  const Index n = a.rows();
  constexpr Index tile = 64;
  for (Index jj = 0; jj < n; jj += tile) {
    for (Index ii = 0; ii <= jj; ii += tile) {
      const Index jend = std::min(jj + tile, n);
      const Index iend = std::min(ii + tile, n);
      for (Index j = jj; j < jend; ++j) {
        for (Index i = ii; i < std::min(iend, j); ++i) a(i, j) = a(j, i);
      }
    }
  }
}

}  // namespace detail

// Overwrites the SPD matrix `a` with its inverse. Only the lower triangle of
// the input is read. Throws NotPositiveDefinite with the failing pivot index.
inline void spd_invert_inplace(Eigen::Ref<Matrix> a, FlopLedger& ledger,
                               Eigen::Index block = kCholeskyBlock) {
  if (a.rows() != a.cols()) throw Error(Errc::shape_mismatch, "spd_invert needs a square matrix");
  if (a.rows() == 0) return;
  detail::factor_blocked(a, ledger, block);
  detail::triangular_inverse_blocked(a, ledger, block);
  detail::triangular_product_blocked(a, ledger, block);
  detail::mirror_lower(a);
}

inline Matrix spd_invert(Matrix a, FlopLedger& ledger) {
  spd_invert_inplace(a, ledger);
  return a;
}

inline Matrix spd_invert(Matrix a) {
  FlopLedger scratch;
  spd_invert_inplace(a, scratch);
  return a;
}

}  // namespace rankup
