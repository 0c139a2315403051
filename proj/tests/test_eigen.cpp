#include <gtest/gtest.h>

#include "support.hpp"

using namespace ectest;

namespace {

double reconstruction_residual(const Matrix& x, const EigenDecomposition& ed) {
  std::vector<double> vals = ed.values;
  const Matrix d = Matrix::diagonal(std::span<const double>(vals));
  return frobenius_norm(ed.vectors * d * ed.vectors.adjoint() - x);
}

}  // namespace

TEST(HermitianEigen, DiagonalInput) {
  const EigenDecomposition ed = hermitian_eigen(Matrix::diagonal({3, 1}));
  ASSERT_EQ(ed.values.size(), 2u);
  EXPECT_EQ(ed.values[0], 3.0);
  EXPECT_EQ(ed.values[1], 1.0);
  EXPECT_EQ(ed.vectors, Matrix::identity(2));
  EXPECT_EQ(ed.sweeps, 0);
}

TEST(HermitianEigen, SwapSpectrumMatchesCharpoly) {
  // det(l I - SWAP) = (l - 1)^3 (l + 1) = l^4 - 2 l^3 + 2 l - 1.
  const auto c = charpoly(swap_matrix(2));
  const std::vector<std::complex<double>> expect{-1.0, 2.0, 0.0, -2.0, 1.0};
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(std::abs(c[k] - expect[k]), 0.0, 1e-14);
  const EigenDecomposition ed = hermitian_eigen(swap_matrix(2));
  const std::vector<double> want{1, 1, 1, -1};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(ed.values[k], want[k], 1e-12);
}

TEST(HermitianEigen, SmallSizesMatchRootOracle) {
  SplitMix64 rng(101);
  for (int t = 0; t < 500; ++t) {
    for (std::size_t n : {2u, 3u}) {
      const Matrix x = random::hermitian(rng, n);
      const std::vector<double> oracle = real_roots_descending(charpoly(x));
      const EigenDecomposition ed = hermitian_eigen(x);
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(ed.values[k], oracle[k], 1e-10) << "n=" << n << " t=" << t;
    }
  }
}

TEST(HermitianEigen, RepeatedRootsOracle) {
  // diag(2,2,-1) conjugated by a unitary: triple-check degenerate handling.
  SplitMix64 rng(102);
  const Matrix u = random::unitary(rng, 3);
  const Matrix x = hermitian_part(u * Matrix::diagonal({2, 2, -1}) * u.adjoint());
  const EigenDecomposition ed = hermitian_eigen(x);
  EXPECT_NEAR(ed.values[0], 2.0, 1e-12);
  EXPECT_NEAR(ed.values[1], 2.0, 1e-12);
  EXPECT_NEAR(ed.values[2], -1.0, 1e-12);
}

TEST(HermitianEigen, ReconstructionUpToSizeNine) {
  SplitMix64 rng(103);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = pick(rng, 2, 9);
    const Matrix x = random::hermitian(rng, n) * (0.01 + 10.0 * rng.uniform());
    const EigenDecomposition ed = hermitian_eigen(x);
    EXPECT_LE(reconstruction_residual(x, ed), 1e-10 * std::max(1.0, frobenius_norm(x)));
    EXPECT_LE(max_abs_diff(ed.vectors.adjoint() * ed.vectors, Matrix::identity(n)), 1e-12);
    EXPECT_TRUE(std::is_sorted(ed.values.begin(), ed.values.end(), std::greater<>()));
  }
}

TEST(HermitianEigen, RejectsNonHermitianAndNonSquare) {
  EXPECT_THROW(hermitian_eigen(Matrix{{1.0, 1.0}, {0.0, 1.0}}), DomainError);
  EXPECT_THROW(hermitian_eigen(Matrix(2, 3)), DimensionError);
  // Roundoff-level asymmetry is absorbed.
  Matrix x = Matrix::diagonal({1, 2});
  x(0, 1) = 1e-14;
  EXPECT_NO_THROW(hermitian_eigen(x));
}

TEST(HermitianEigen, SweepCapRaisesNumericalError) {
  SplitMix64 rng(104);
  const Matrix x = random::hermitian(rng, 6);
  EXPECT_THROW(hermitian_eigen(x, {}, 1), NumericalError);
  const EigenDecomposition ed = hermitian_eigen(x);
  EXPECT_LT(ed.sweeps, kMaxJacobiSweeps);
  EXPECT_NO_THROW(hermitian_eigen(x, {}, ed.sweeps));
}

TEST(IsPsd, Examples) {
  EXPECT_TRUE(is_psd(Matrix::identity(4)).psd);
  EXPECT_TRUE(is_psd(Matrix(4, 4)).psd);
  const PsdResult r = is_psd(swap_matrix(2));
  EXPECT_FALSE(r.psd);
  EXPECT_NEAR(r.min_eigenvalue, -1.0, 1e-12);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NEAR(std::real(expectation(swap_matrix(2), *r.witness)), -1.0, 1e-12);
  // Antisymmetric: (e1 (x) e2 - e2 (x) e1)/sqrt2 up to phase.
  const Vector& w = *r.witness;
  EXPECT_NEAR(std::abs(w[1]), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(std::abs(w[1] + w[2]), 0.0, 1e-12);
}

TEST(IsPsd, SlackIsRelative) {
  // -1e-10 eigenvalue: within slack at unit scale.
  EXPECT_TRUE(is_psd(Matrix::diagonal({1.0, -1e-10})).psd);
  EXPECT_FALSE(is_psd(Matrix::diagonal({1.0, -1e-8})).psd);
  // Large norm widens the slack proportionally.
  EXPECT_TRUE(is_psd(Matrix::diagonal({1e4, -1e-6})).psd);
  // Tiny matrices still use the absolute floor.
  EXPECT_TRUE(is_psd(Matrix::diagonal({1e-12, -1e-10})).psd);
}

TEST(IsPsd, FullTransposePreservesVerdict) {
  SplitMix64 rng(105);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = pick(rng, 2, 6);
    const Matrix x = t % 2 == 0 ? random_psd(rng, n, pick(rng, 1, n)) : random::hermitian(rng, n);
    const PsdResult a = is_psd(x), b = is_psd(x.transpose());
    EXPECT_EQ(a.psd, b.psd);
    EXPECT_NEAR(a.min_eigenvalue, b.min_eigenvalue, 1e-10);
  }
}

TEST(SupportProjection, Examples) {
  EXPECT_LE(max_abs_diff(support_projection(Matrix::diagonal({0.5, 0, 0.5})), Matrix::diagonal({1, 0, 1})), 1e-12);
  SplitMix64 rng(106);
  const Vector v = random::unit_vector(rng, 3);
  EXPECT_LE(max_abs_diff(support_projection(outer(v) * 2.5), outer(v)), 1e-12);
  const Matrix a = random::gaussian(rng, 3, 2);
  const Matrix x = a * a.adjoint();
  const Matrix p = support_projection(x);
  EXPECT_NEAR(std::real(trace(p)), 2.0, 1e-12);
  EXPECT_LE(frobenius_norm(p * x - x), 1e-9);
  EXPECT_LE(max_abs_diff(p * p, p), 1e-12);
}

TEST(SupportProjection, RejectsNonPsd) {
  EXPECT_THROW(support_projection(swap_matrix(2)), DomainError);
}

TEST(SpectralHelpers, ProjectionAndFunction) {
  SplitMix64 rng(107);
  const Matrix x = random::hermitian(rng, 4);
  const Matrix p = psd_projection(x);
  EXPECT_TRUE(is_psd(p).psd);
  EXPECT_TRUE(is_psd(p - x).psd);  // x_+ - x = x_- >= 0
  const Matrix y = random_psd(rng, 3, 3);
  const Matrix sq = spectral_function(y, [](double v) { return std::sqrt(std::max(v, 0.0)); });
  EXPECT_TRUE(is_psd(sq).psd);
  EXPECT_LE(max_abs_diff(sq * sq, y), 1e-12);
}
