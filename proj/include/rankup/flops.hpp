#pragma once

#include <cstdint>

namespace rankup {

// Counts floating-point operations: one add, multiply, divide or square root
// is one FLOP. Sign changes and copies are free.
class FlopLedger {
 public:
  void add(std::uint64_t flops) noexcept { count_ += flops; }
  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  void reset() noexcept { count_ = 0; }

 private:
  std::uint64_t count_{0};
};

// Costs of the elementary products, one FLOP per scalar add or multiply.
namespace elem {

// row vector (1 x p) times column vector (p x 1)
constexpr std::uint64_t row_col(std::uint64_t p) noexcept { return 2 * p - 1; }
// column vector (p x 1) times row vector (1 x q)
constexpr std::uint64_t col_row(std::uint64_t p, std::uint64_t q) noexcept { return p * q; }
// row vector (1 x p) times matrix (p x q)
constexpr std::uint64_t rowvec_mat(std::uint64_t p, std::uint64_t q) noexcept {
  return 2 * p * q - q;
}
// matrix (p x q) times column vector (q x 1)
constexpr std::uint64_t mat_colvec(std::uint64_t p, std::uint64_t q) noexcept {
  return 2 * p * q - p;
}
// matrix (p x m) times matrix (m x q)
constexpr std::uint64_t mat_mat(std::uint64_t p, std::uint64_t m, std::uint64_t q) noexcept {
  return 2 * p * q * m - p * q;
}
// term-by-term sum of two p x q matrices
constexpr std::uint64_t mat_add(std::uint64_t p, std::uint64_t q) noexcept { return p * q; }

}  // namespace elem

// Exact operation counts of the three phases of the Cholesky-based inverse.
namespace inversion_cost {

// L L^T = A
constexpr std::uint64_t factor(std::uint64_t n) noexcept {
  return (2 * n * n * n + 3 * n * n + n) / 6;
}
// L -> L^{-1}
constexpr std::uint64_t triangular_inverse(std::uint64_t n) noexcept {
  return (n * n * n + 2 * n) / 3;
}
// L^{-1} -> L^{-T} L^{-1}
constexpr std::uint64_t triangular_product(std::uint64_t n) noexcept { return factor(n); }

constexpr std::uint64_t total(std::uint64_t n) noexcept {
  return factor(n) + triangular_inverse(n) + triangular_product(n);
}

static_assert(total(1) == 3 && total(2) == 14 && total(10) == 1110);

}  // namespace inversion_cost

}  // namespace rankup
