#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "itreg/errors.hpp"
#include "itreg/linalg.hpp"
#include "itreg/problems.hpp"

using namespace itreg;
using namespace itreg::linalg;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  DenseMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = d(gen);
  return a;
}

DenseMatrix random_symmetric(std::size_t n, std::mt19937_64& gen) {
  const DenseMatrix b = random_matrix(n, n, gen);
  return 0.5 * (b + b.transpose());
}

double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).frobenius_norm() / std::max(1.0, b.frobenius_norm());
}

double orthonormality_defect(const DenseMatrix& v) {
  return (gram(v) - DenseMatrix::identity(v.cols())).max_abs();
}

DenseMatrix eig_reconstruct(const SymEig& e) { return spectral_map(e, [](double x) { return x; }); }

}  // namespace

TEST(DenseMatrix, RejectsBadEntries) {
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), InvalidInput);
  EXPECT_THROW(DenseMatrix(1, 2, std::vector<double>{1, NAN}), InvalidInput);
  EXPECT_THROW(DenseMatrix({{1, 2}, {3}}), InvalidInput);
}

TEST(DenseMatrix, BasicOperations) {
  const DenseMatrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(a.transpose(), (DenseMatrix{{1, 3}, {2, 4}}));
  EXPECT_EQ(a * DenseMatrix::identity(2), a);
  EXPECT_EQ(multiply(a, std::vector<double>{1, 1}), (Vector{3, 7}));
  EXPECT_EQ(multiply_transposed(a, std::vector<double>{1, 1}), (Vector{4, 6}));
  EXPECT_EQ(gram(a), a.transpose() * a);
  EXPECT_DOUBLE_EQ(a.frobenius_norm(), std::sqrt(30.0));
  EXPECT_THROW(a * DenseMatrix(3, 3), InvalidInput);
}

TEST(Norm2, AvoidsOverflowAndUnderflow) {
  EXPECT_DOUBLE_EQ(norm2(std::vector<double>{3e200, 4e200}), 5e200);
  EXPECT_DOUBLE_EQ(norm2(std::vector<double>{3e-200, 4e-200}), 5e-200);
  EXPECT_EQ(norm2(std::vector<double>{}), 0.0);
}

TEST(SymEig, IdentityAndDiagonal) {
  auto e = sym_eig(DenseMatrix::identity(2));
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-15);

  e = sym_eig(DenseMatrix{{1, 0}, {0, 4}});
  EXPECT_NEAR(e.eigenvalues[0], 4.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 1)), 1.0, 1e-15);
}

TEST(SymEig, TwoByTwo) {
  const auto e = sym_eig(DenseMatrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
}

TEST(SymEig, RejectsNonSymmetric) {
  EXPECT_THROW(sym_eig(DenseMatrix(2, 3)), InvalidInput);
  EXPECT_THROW(sym_eig(DenseMatrix{{1, 2}, {0, 1}}), InvalidInput);
}

TEST(SymEig, RandomReconstructionProperty) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix s = random_symmetric(5, gen);
    const SymEig e = sym_eig(s);
    EXPECT_LT(rel_diff(eig_reconstruct(e), s), 1e-10);
    EXPECT_LT(orthonormality_defect(e.eigenvectors), 1e-10);
    for (std::size_t j = 0; j + 1 < e.eigenvalues.size(); ++j) EXPECT_GE(e.eigenvalues[j], e.eigenvalues[j + 1]);
    const double scale = std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
    for (std::size_t j = 0; j < 5; ++j) {
      const Vector v = e.eigenvectors.column(j);
      EXPECT_LT(norm2(subtract(multiply(s, v), scaled(e.eigenvalues[j], v))), 1e-10 * scale);
    }
  }
}

TEST(SingularSystem, Examples) {
  auto sys = singular_system(DenseMatrix::identity(3));
  for (double m : sys.mu) EXPECT_NEAR(m, 1.0, 1e-15);

  sys = singular_system(DenseMatrix{{0, 1}, {1, 0}});
  EXPECT_NEAR(sys.mu[0], 1.0, 1e-15);
  EXPECT_NEAR(sys.mu[1], 1.0, 1e-15);

  const DenseMatrix d{{3, 0}, {0, -2}};
  sys = singular_system(d);
  EXPECT_NEAR(sys.mu[0], 3.0, 1e-15);
  EXPECT_NEAR(sys.mu[1], 2.0, 1e-15);
  EXPECT_LT(rel_diff(sys.reconstruct(), d), 1e-14);
}

TEST(SingularSystem, RandomRectangularProperty) {
  std::mt19937_64 gen(2);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{6, 4}, {4, 6}, {5, 5}, {1, 3}, {3, 1}}) {
    const DenseMatrix a = random_matrix(r, c, gen);
    const SingularSystem sys = singular_system(a);
    ASSERT_EQ(sys.size(), std::min(r, c));
    EXPECT_LT(rel_diff(sys.reconstruct(), a), 1e-10);
    EXPECT_LT(orthonormality_defect(sys.left_vectors), 1e-10);
    EXPECT_LT(orthonormality_defect(sys.right_vectors), 1e-10);
    for (std::size_t j = 0; j < sys.size(); ++j) {
      if (j + 1 < sys.size()) EXPECT_GE(sys.mu[j], sys.mu[j + 1]);
      EXPECT_GE(sys.mu[j], 0.0);
      const Vector av = multiply(a, sys.right_vectors.column(j));
      EXPECT_LT(norm2(subtract(av, scaled(sys.mu[j], sys.left_vectors.column(j)))), 1e-10 * sys.mu1());
    }
  }
}

TEST(SingularSystem, RankDeficientKeepsOrthonormalVectors) {
  const DenseMatrix a{{1, 2, 3}, {2, 4, 6}, {1, 1, 1}};
  const SingularSystem sys = singular_system(a);
  EXPECT_LT(sys.mu[2], 1e-14 * sys.mu1());
  EXPECT_LT(orthonormality_defect(sys.left_vectors), 1e-10);
  EXPECT_LT(rel_diff(sys.reconstruct(), a), 1e-12);
}

TEST(SingularSystem, MatchesEigenvaluesOfPsdMatrix) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix s = gram(random_matrix(6, 6, gen));
    const SymEig e = sym_eig(s);
    const SingularSystem sys = singular_system(s);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(sys.mu[j], e.eigenvalues[j], 1e-10 * e.eigenvalues[0]);
  }
}

TEST(SingularSystem, ResolvesSmallSingularValuesOfIllConditionedMatrix) {
  // Graded diagonal scaled by orthogonal factors; exact singular values known.
  std::mt19937_64 gen(4);
  const SymEig q1 = sym_eig(random_symmetric(8, gen));
  const SymEig q2 = sym_eig(random_symmetric(8, gen));
  Vector d(8);
  for (int j = 0; j < 8; ++j) d[j] = std::pow(1e-2, j);
  const DenseMatrix a = q1.eigenvectors * DenseMatrix::diagonal(d) * q2.eigenvectors.transpose();
  const SingularSystem sys = singular_system(a);
  for (int j = 0; j < 7; ++j) EXPECT_NEAR(sys.mu[j] / d[j], 1.0, 1e-3) << j;
}

TEST(SymMatrixPower, Examples) {
  EXPECT_LT(rel_diff(sym_matrix_power(DenseMatrix{{4, 0}, {0, 9}}, 0.5), DenseMatrix{{2, 0}, {0, 3}}), 1e-15);
  const DenseMatrix s{{2, 1}, {1, 2}};
  EXPECT_EQ(sym_matrix_power(s, 1.0), s);
  EXPECT_LT(rel_diff(sym_matrix_power(s, 2.0), DenseMatrix{{5, 4}, {4, 5}}), 1e-14);
  EXPECT_LT(rel_diff(sym_matrix_power(s, 0.0), DenseMatrix::identity(2)), 1e-14);
}

TEST(SymMatrixPower, Errors) {
  EXPECT_THROW(sym_matrix_power(DenseMatrix{{1, 0}, {0, -1}}, 0.5), NotPositiveSemidefinite);
  EXPECT_THROW(sym_matrix_power(DenseMatrix{{1, 0}, {0, -1}}, 1.0), NotPositiveSemidefinite);
  EXPECT_THROW(sym_matrix_power(DenseMatrix::identity(2), -1.0), InvalidParameter);
  // Roundoff negatives are clamped.
  const DenseMatrix tiny{{1, 0}, {0, -1e-14}};
  const DenseMatrix p = sym_matrix_power(tiny, 0.5);
  EXPECT_EQ(p(1, 1), 0.0);
}

TEST(SymMatrixPower, PowerLawProperty) {
  std::mt19937_64 gen(5);
  const std::vector<double> rs{0.5, 0.8, 1.0, 2.0};
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix s = gram(random_matrix(5, 5, gen));
    for (double r1 : rs)
      for (double r2 : rs) {
        const DenseMatrix lhs = sym_matrix_power(s, r1) * sym_matrix_power(s, r2);
        const DenseMatrix rhs = sym_matrix_power(s, r1 + r2);
        EXPECT_LT((lhs - rhs).frobenius_norm() / rhs.frobenius_norm(), 1e-9) << r1 << " " << r2;
      }
  }
}

TEST(SolveSpd, Examples) {
  const Vector b{3, -1};
  EXPECT_EQ(solve_spd(DenseMatrix::identity(2), b), b);
  const Vector x = solve_spd(DenseMatrix{{2, 0}, {0, 4}}, std::vector<double>{2, 4});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  const Vector y = solve_spd(DenseMatrix::identity(2) + DenseMatrix{{1, 0}, {0, 4}}, std::vector<double>{2, 5});
  EXPECT_NEAR(y[0], 1.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0, 1e-15);
}

TEST(SolveSpd, RejectsIndefinite) {
  EXPECT_THROW(solve_spd(DenseMatrix{{1, 2}, {2, 1}}, std::vector<double>{1, 1}), DecompositionFailure);
  EXPECT_THROW(solve_spd(DenseMatrix(2, 2), std::vector<double>{1, 1}), DecompositionFailure);
}

TEST(SolveSpd, ResidualProperty) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    DenseMatrix s = gram(random_matrix(6, 6, gen));
    for (std::size_t i = 0; i < 6; ++i) s(i, i) += 1e-3;
    const double cond = condition_number(s);
    ASSERT_LE(cond, 1e6);
    const Vector b = random_matrix(6, 1, gen).column(0);
    const Vector x = solve_spd(s, b);
    EXPECT_LE(norm2(subtract(multiply(s, x), b)), 1e-10 * norm2(b) * cond);
  }
}

TEST(SolveGeneral, Examples) {
  const Vector b{1, 2, 3};
  EXPECT_EQ(solve_general(DenseMatrix::identity(3), b), b);
  const Vector x = solve_general(DenseMatrix{{1, 1}, {0, 1}}, std::vector<double>{3, 1});
  EXPECT_NEAR(x[0], 2.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(SolveGeneral, PivotsAndRejectsSingular) {
  const Vector x = solve_general(DenseMatrix{{0, 1}, {1, 0}}, std::vector<double>{2, 3});
  EXPECT_EQ(x, (Vector{3, 2}));
  EXPECT_THROW(solve_general(DenseMatrix{{1, 2}, {2, 4}}, std::vector<double>{1, 1}), SingularMatrix);
  EXPECT_THROW(solve_general(DenseMatrix(2, 3), std::vector<double>{1, 1}), InvalidInput);
}

TEST(SolveGeneral, SimpsonSystemBlowsUp) {
  const auto p = problems::simpson_problem(32);
  const Vector x = solve_general(p.a, p.y_exact);
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, std::abs(v - 1.0));
  EXPECT_GE(worst, 1.0);
}

TEST(ConditionNumber, Examples) {
  EXPECT_NEAR(condition_number(DenseMatrix::identity(4)), 1.0, 1e-15);
  EXPECT_NEAR(condition_number(DenseMatrix{{10, 0}, {0, 1}}), 10.0, 1e-13);
  EXPECT_TRUE(std::isinf(condition_number(DenseMatrix{{1, 0}, {0, 0}})));
  EXPECT_THROW(condition_number(DenseMatrix(2, 2)), InvalidInput);
  EXPECT_GE(condition_number(problems::simpson_problem(32).a), 1e15);
}
