#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "rankup/basis.hpp"
#include "support/oracles.hpp"

using namespace rankup;

namespace {

std::vector<std::vector<int>> as_ints(const MonomialBasis& b) {
  std::vector<std::vector<int>> out;
  for (const auto& idx : b.indices()) out.emplace_back(idx.exponents.begin(), idx.exponents.end());
  return out;
}

}  // namespace

TEST(BasisSize, KnownValues) {
  EXPECT_EQ(basis_size(8, 5), 1287u);
  EXPECT_EQ(basis_size(3, 0), 1u);
  EXPECT_EQ(basis_size(2, 2), 6u);
  EXPECT_EQ(basis_size(1, 3), 4u);
}

TEST(BasisSize, MatchesBinomialOracle) {
  for (std::uint64_t d = 1; d <= 12; ++d) {
    for (std::uint64_t n = 0; n <= 12; ++n) {
      EXPECT_EQ(basis_size(d, n), oracle::binomial(d + n, n)) << d << "," << n;
    }
  }
}

TEST(BasisSize, ZeroDimensionRejected) {
  try {
    (void)basis_size(0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_dimension);
  }
}

TEST(BasisSize, OverflowIsReported) {
  // binomial(1000 + 255, 255) is far beyond 64 bits.
  try {
    (void)basis_size(1000, 255);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::overflow);
  }
  // binomial(67, 33) still fits in 64 bits; intermediate products must not wrap.
  EXPECT_EQ(basis_size(34, 33), 14226520737620288370ull);
}

TEST(Enumerate, GradedLexSmallCases) {
  EXPECT_EQ(as_ints(enumerate_basis(2, 2)),
            (std::vector<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}));
  EXPECT_EQ(as_ints(enumerate_basis(1, 3)), (std::vector<std::vector<int>>{{0}, {1}, {2}, {3}}));
  EXPECT_EQ(as_ints(enumerate_basis(3, 1)),
            (std::vector<std::vector<int>>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
}

TEST(Enumerate, MatchesBruteForceOracle) {
  for (int d = 1; d <= 4; ++d) {
    for (int n = 0; n <= 5; ++n) {
      const MonomialBasis b(static_cast<std::size_t>(d), static_cast<std::size_t>(n));
      EXPECT_EQ(b.size(), basis_size(d, n));
      EXPECT_EQ(as_ints(b), oracle::graded_lex(d, n)) << "d=" << d << " n=" << n;
    }
  }
}

TEST(Enumerate, OrderingAndDegreeInvariants) {
  const MonomialBasis b(3, 4);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    EXPECT_TRUE(graded_lex_less(b[i], b[i + 1])) << i;
    EXPECT_FALSE(graded_lex_less(b[i + 1], b[i])) << i;
  }
  for (const auto& idx : b.indices()) {
    unsigned sum = 0;
    for (auto e : idx.exponents) sum += e;
    EXPECT_EQ(idx.total_degree(), sum);
    EXPECT_LE(sum, 4u);
  }
}

TEST(Enumerate, DegreeAbove255Rejected) {
  EXPECT_THROW(MonomialBasis(1, 256), Error);
}

TEST(Vectorize, Examples) {
  const MonomialBasis b22(2, 2);
  const std::vector<double> x{2.0, 3.0};
  const Vector v = b22.vectorize(x);
  EXPECT_EQ(v, (Vector(6) << 1, 2, 3, 4, 6, 9).finished());

  const MonomialBasis b12(1, 2);
  EXPECT_EQ(b12.vectorize(std::vector<double>{2.0}), (Vector(3) << 1, 2, 4).finished());

  const MonomialBasis b34(3, 4);
  const Vector z = b34.vectorize(std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_EQ(z(0), 1.0);
  EXPECT_EQ(z.tail(z.size() - 1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Vectorize, DimensionMismatch) {
  const MonomialBasis b(2, 2);
  try {
    (void)b.vectorize(std::vector<double>{1.0, 2.0, 3.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::shape_mismatch);
  }
}

// Bitwise agreement with the naive per-monomial product on random reals.
TEST(Vectorize, BruteForceEquivalenceExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int d = 1; d <= 3; ++d) {
    for (int n = 0; n <= 4; ++n) {
      const MonomialBasis b(static_cast<std::size_t>(d), static_cast<std::size_t>(n));
      const auto exps = oracle::graded_lex(d, n);
      for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(d));
        for (auto& xi : x) xi = u(rng);
        const Vector v = b.vectorize(x);
        for (std::size_t i = 0; i < exps.size(); ++i) {
          ASSERT_EQ(v(static_cast<Eigen::Index>(i)), oracle::monomial(x, exps[i]));
        }
      }
    }
  }
}

TEST(VectorizeBatch, RowsMatchVectorize) {
  const MonomialBasis b(2, 2);
  const Matrix X = b.vectorize_batch(std::vector<std::vector<double>>{{2, 3}, {1, 1}});
  ASSERT_EQ(X.rows(), 2);
  EXPECT_EQ(X.row(0), (Eigen::RowVectorXd(6) << 1, 2, 3, 4, 6, 9).finished());
  EXPECT_EQ(X.row(1), Eigen::RowVectorXd::Ones(6));

  const Matrix single = b.vectorize_batch(std::vector<std::vector<double>>{{2, 3}});
  EXPECT_EQ(single.row(0).transpose(), b.vectorize(std::vector<double>{2, 3}));
}

TEST(VectorizeBatch, EmptyBatchRejected) {
  const MonomialBasis b(2, 2);
  try {
    (void)b.vectorize_batch(std::vector<std::vector<double>>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_batch);
  }
}
