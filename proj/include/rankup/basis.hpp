#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rankup/error.hpp"

namespace rankup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Exponent tuple of a d-variate monomial.
struct MultiIndex {
  std::vector<std::uint8_t> exponents;

  [[nodiscard]] unsigned total_degree() const noexcept {
    return std::accumulate(exponents.begin(), exponents.end(), 0u);
  }
  [[nodiscard]] std::size_t dimension() const noexcept { return exponents.size(); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

// Graded-lex comparator: lower total degree first, then the tuple with the
// larger x1 exponent (then x2, ...) first, so x1^2 < x1*x2 < x2^2.
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) noexcept {
  const unsigned da = a.total_degree();
  const unsigned db = b.total_degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(b.exponents.begin(), b.exponents.end(),
                                      a.exponents.begin(), a.exponents.end());
}

// binomial(d + n, n), the number of monomials of degree <= n in d variables.
inline std::size_t basis_size(std::size_t d, std::size_t n) {
  if (d == 0) throw Error(Errc::invalid_dimension, "dimension d must be >= 1");
  std::size_t c = 1;  // binomial(d + i, i) after step i
  for (std::size_t i = 1; i <= n; ++i) {
    // c * (d + i) / i computed without losing exactness: i / g divides d + i.
    const std::size_t g = std::gcd(c, i);
    const std::size_t num = d + i;
    if (num < d) throw Error(Errc::overflow, "basis size overflows size_t");
    std::size_t next = 0;
    if (__builtin_mul_overflow(c / g, num / (i / g), &next)) {
      throw Error(Errc::overflow, "basis size binomial(" + std::to_string(d + n) + ", " +
                                      std::to_string(n) + ") overflows size_t");
    }
    c = next;
  }
  return c;
}

class MonomialBasis {
 public:
  static constexpr std::size_t kMaxDegree = 255;

  MonomialBasis(std::size_t d, std::size_t n) : d_(d), n_(n) {
    if (n > kMaxDegree) {
      throw Error(Errc::invalid_dimension, "degree n must be <= 255");
    }
    const std::size_t s = basis_size(d, n);
    indices_.reserve(s);
    std::vector<std::uint8_t> current(d, 0);
    for (std::size_t degree = 0; degree <= n; ++degree) {
      emit_block(current, 0, degree);
    }
    build_parents();
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return d_; }
  [[nodiscard]] std::size_t degree() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  [[nodiscard]] const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }

  // Writes v_n(x) into out. Each monomial is its parent (last nonzero
  // exponent decremented) times one coordinate, so the multiplication order
  // matches a left-to-right evaluation of prod_j x_j^a_j.
  void vectorize_into(std::span<const double> x, Eigen::Ref<Vector> out) const {
    check_point(x);
    if (static_cast<std::size_t>(out.size()) != size()) {
      throw Error(Errc::shape_mismatch, "output length differs from basis size");
    }
    out[0] = 1.0;
    for (std::size_t i = 1; i < parent_.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] =
          out[static_cast<Eigen::Index>(parent_[i])] * x[variable_[i]];
    }
  }

  [[nodiscard]] Vector vectorize(std::span<const double> x) const {
    Vector out(static_cast<Eigen::Index>(size()));
    vectorize_into(x, out);
    return out;
  }

  // Rows of the k x s design matrix X. points is row-major k x d.
  [[nodiscard]] Matrix vectorize_batch(std::span<const double> points) const {
    if (points.empty()) throw Error(Errc::empty_batch, "batch has no points");
    if (points.size() % d_ != 0) {
      throw Error(Errc::shape_mismatch, "flat point buffer is not a multiple of d");
    }
    const std::size_t k = points.size() / d_;
    Matrix X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(size()));
    Vector row(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < k; ++i) {
      vectorize_into(points.subspan(i * d_, d_), row);
      X.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return X;
  }

  [[nodiscard]] Matrix vectorize_batch(const std::vector<std::vector<double>>& points) const {
    if (points.empty()) throw Error(Errc::empty_batch, "batch has no points");
    std::vector<double> flat;
    flat.reserve(points.size() * d_);
    for (const auto& p : points) {
      check_point(p);
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return vectorize_batch(std::span<const double>(flat));
  }

 private:
  void check_point(std::span<const double> x) const {
    if (x.size() != d_) {
      throw Error(Errc::shape_mismatch, "point has " + std::to_string(x.size()) +
                                            " coordinates, basis expects " + std::to_string(d_));
    }
  }

  // All exponent tuples of total degree `remaining` over variables
  // [var, d), x_var exponent descending.
  void emit_block(std::vector<std::uint8_t>& current, std::size_t var, std::size_t remaining) {
    if (var + 1 == d_) {
      current[var] = static_cast<std::uint8_t>(remaining);
      indices_.push_back(MultiIndex{current});
      current[var] = 0;
      return;
    }
    for (std::size_t e = remaining + 1; e-- > 0;) {
      current[var] = static_cast<std::uint8_t>(e);
      emit_block(current, var + 1, remaining - e);
    }
    current[var] = 0;
  }

  void build_parents() {
    std::map<std::vector<std::uint8_t>, std::size_t> position;
    for (std::size_t i = 0; i < indices_.size(); ++i) position.emplace(indices_[i].exponents, i);
    parent_.assign(indices_.size(), 0);
    variable_.assign(indices_.size(), 0);
    for (std::size_t i = 1; i < indices_.size(); ++i) {
      auto key = indices_[i].exponents;
      std::size_t j = d_;
      while (key[j - 1] == 0) --j;
      --key[j - 1];
      parent_[i] = position.at(key);
      variable_[i] = j - 1;
    }
  }

  std::size_t d_;
  std::size_t n_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> variable_;
};

inline MonomialBasis enumerate_basis(std::size_t d, std::size_t n) { return MonomialBasis(d, n); }

}  // namespace rankup
