#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spectranet/errors.hpp"
#include "spectranet/spectral.hpp"
#include "spectranet/synth.hpp"

using namespace spectranet;

namespace {

ReturnPanel panel_from_rows(const std::vector<std::vector<double>>& rows) {
  ReturnPanel p;
  p.returns = Matrix(rows.size(), rows.front().size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    p.tickers.push_back("T" + std::to_string(j));
    for (std::size_t t = 0; t < rows[j].size(); ++t) p.returns(j, t) = rows[j][t];
  }
  Date d = Date::parse("2000-01-01");
  for (std::size_t t = 0; t < rows.front().size(); ++t, d = d.next_day()) p.dates.push_back(d);
  return p;
}

Matrix two_by_two(double rho) {
  Matrix m = Matrix::identity(2);
  m(0, 1) = m(1, 0) = rho;
  return m;
}

double orthonormality_error(const EigenSystem& e) {
  const Matrix vtv = e.eigenvectors.transposed() * e.eigenvectors;
  return max_abs_diff(vtv, Matrix::identity(e.n()));
}

}  // namespace

TEST(Correlation, PerfectAndAntiCorrelation) {
  const auto c = correlation(panel_from_rows({{1, 2, 4, 3}, {2, 4, 8, 6}, {-1, -2, -4, -3}}));
  EXPECT_NEAR(c.values(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(c.values(0, 2), -1.0, 1e-12);
  EXPECT_EQ(c.values(1, 1), 1.0);
  EXPECT_NO_THROW(validate(c));
}

TEST(Correlation, IndependentRowsNearZero) {
  // Sampling error of a correlation is ~1/sqrt(T); +-0.02 is above 3/sqrt(1e5) ~ 0.0095.
  const auto c = correlation(gen_noise(3, 100000, 5));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) EXPECT_LT(std::abs(c.values(i, j)), 0.02);
}

TEST(Correlation, ZeroVarianceRowIsAnError) {
  EXPECT_THROW(correlation(panel_from_rows({{1, 2, 3}, {4, 4, 4}})), InputError);
}

TEST(Correlation, InvariantUnderAffineRowRescaling) {
  auto panel = gen_noise(6, 300, 17);
  const auto base = correlation(panel);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> scale(0.01, 50.0), shift(-10.0, 10.0);
  for (std::size_t j = 0; j < panel.n(); ++j) {
    const double a = scale(gen), b = shift(gen);
    for (double& v : panel.returns.row(j)) v = a * v + b;
  }
  EXPECT_LE(max_abs_diff(correlation(panel).values, base.values), 1e-10);
  EXPECT_LE(max_abs_diff(correlation(standardize(panel)).values, base.values), 1e-10);
}

TEST(Eigendecompose, Identity) {
  const auto e = eigendecompose(Matrix::identity(3));
  for (double l : e.eigenvalues) EXPECT_DOUBLE_EQ(l, 1.0);
  EXPECT_LE(orthonormality_error(e), 1e-15);
}

TEST(Eigendecompose, TwoByTwoClosedForm) {
  const auto e = eigendecompose(two_by_two(0.5));
  EXPECT_NEAR(e.eigenvalues[0], 1.5, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 0.5, 1e-14);
  const double h = std::sqrt(0.5);
  EXPECT_NEAR(e.eigenvectors(0, 0), h, 1e-14);
  EXPECT_NEAR(e.eigenvectors(1, 0), h, 1e-14);
  // Sign rule: largest-magnitude entry positive; on the tie it is the first.
  EXPECT_NEAR(e.eigenvectors(0, 1), h, 1e-14);
  EXPECT_NEAR(e.eigenvectors(1, 1), -h, 1e-14);
}

TEST(Eigendecompose, MatchesCharacteristicPolynomialOracle) {
  std::mt19937_64 gen(2024);
  const Matrix c = oracle::random_correlation(6, gen, 4);
  const auto expected = oracle::eigenvalues_by_bisection(c);
  const auto e = eigendecompose(CorrelationMatrix{{}, c});
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(e.eigenvalues[k], expected[k], 1e-6);
}

TEST(Eigendecompose, InvariantsOnRandomCorrelations) {
  std::mt19937_64 gen(99);
  for (std::size_t n : {3u, 10u, 40u}) {
    const Matrix c = oracle::random_correlation(n, gen);
    const auto e = eigendecompose(CorrelationMatrix{{}, c});
    EXPECT_LE(orthonormality_error(e), 1e-8);
    EXPECT_LE(max_abs_diff(reconstruct(e, {1, n}), c), 1e-8);
    double trace = 0;
    for (std::size_t k = 0; k < n; ++k) {
      trace += e.eigenvalues[k];
      EXPECT_GE(e.eigenvalues[k], -1e-8);
      if (k) EXPECT_GE(e.eigenvalues[k - 1], e.eigenvalues[k]);
    }
    EXPECT_NEAR(trace, static_cast<double>(n), 1e-6);
  }
}

TEST(Eigendecompose, DeterministicBits) {
  std::mt19937_64 gen(7);
  const Matrix c = oracle::random_correlation(25, gen);
  const auto a = eigendecompose(c);
  const auto b = eigendecompose(c);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
}

TEST(Eigendecompose, ReportsNonConvergence) {
  std::mt19937_64 gen(3);
  const Matrix c = oracle::random_correlation(8, gen);
  try {
    eigendecompose(c, JacobiOptions{1, 1e-12});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("off-diagonal norm"), std::string::npos);
  }
}

TEST(Eigendecompose, RejectsNonSymmetric) {
  Matrix m = two_by_two(0.5);
  m(0, 1) = 0.1;
  EXPECT_THROW(eigendecompose(m), InputError);
  EXPECT_THROW(eigendecompose(CorrelationMatrix{{}, m}), InputError);
}

TEST(RmtBounds, ClosedForms) {
  auto b = rmt_bounds(100, 400);
  EXPECT_DOUBLE_EQ(b.q, 4.0);
  EXPECT_DOUBLE_EQ(b.lambda_plus, 2.25);
  EXPECT_DOUBLE_EQ(b.lambda_minus, 0.25);
  b = rmt_bounds(2, 200);
  EXPECT_DOUBLE_EQ(b.q, 100.0);
  EXPECT_NEAR(b.lambda_plus, 1.21, 1e-15);
  EXPECT_NEAR(b.lambda_minus, 0.81, 1e-15);
  EXPECT_THROW(rmt_bounds(100, 100), InputError);
  EXPECT_THROW(rmt_bounds(100, 50), InputError);
}

TEST(RmtBounds, NoiseSpectrumMostlyInsideBand) {
  const auto bounds = rmt_bounds(50, 500);
  double inside_total = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto e = eigendecompose(correlation(standardize(gen_noise(50, 500, 1000 + s))));
    std::size_t inside = 0;
    for (double l : e.eigenvalues) inside += (l >= bounds.lambda_minus && l <= bounds.lambda_plus);
    inside_total += static_cast<double>(inside) / 50.0;
  }
  EXPECT_GE(inside_total / seeds, 0.96);
}

TEST(Reconstruct, FullBandAndRankOne) {
  const Matrix c = two_by_two(0.5);
  const auto e = eigendecompose(c);
  EXPECT_LE(max_abs_diff(reconstruct(e, {1, 2}), c), 1e-10);
  const Matrix r1 = reconstruct(e, {1, 1});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(r1(i, j), 0.75, 1e-14);
  const auto rn = renormalize(r1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(rn.matrix.values(i, j), 1.0, 1e-14);
}

TEST(Reconstruct, ComplementaryBandsSumToOriginal) {
  std::mt19937_64 gen(5);
  const std::size_t n = 12;
  const Matrix c = oracle::random_correlation(n, gen);
  const auto e = eigendecompose(c);
  for (std::size_t k = 1; k < n; ++k) {
    EXPECT_LE(max_abs_diff(reconstruct(e, {1, k}) + reconstruct(e, {k + 1, n}), c), 1e-10);
  }
}

TEST(Reconstruct, AccumulatorMatchesDirectSumBitForBit) {
  std::mt19937_64 gen(8);
  const Matrix c = oracle::random_correlation(15, gen);
  const auto e = eigendecompose(c);
  ReconstructionAccumulator acc(e, 2);
  for (std::size_t end = 2; end <= 15; ++end) {
    EXPECT_EQ(acc.extend_to(end), reconstruct(e, {2, end}));
  }
}

TEST(Reconstruct, BandValidation) {
  const auto e = eigendecompose(two_by_two(0.2));
  EXPECT_THROW(reconstruct(e, {0, 1}), InputError);
  EXPECT_THROW(reconstruct(e, {2, 1}), InputError);
  EXPECT_THROW(reconstruct(e, {1, 3}), InputError);
}

TEST(Renormalize, ClosedFormsAndErrors) {
  Matrix m(2, 2);
  m(0, 0) = 4;
  m(0, 1) = m(1, 0) = 2;
  m(1, 1) = 1;
  const auto r = renormalize(m);
  EXPECT_DOUBLE_EQ(r.matrix.values(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(r.matrix.values(0, 0), 1.0);

  std::mt19937_64 gen(4);
  const Matrix c = oracle::random_correlation(9, gen);
  EXPECT_LE(max_abs_diff(renormalize(c).matrix.values, c), 1e-12);

  m(1, 1) = 0.0;
  try {
    renormalize(m);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("stock 1"), std::string::npos);
  }
}

TEST(Renormalize, ClampsAndCounts) {
  Matrix m(2, 2);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(0, 1) = m(1, 0) = 1.0 + 1e-9;
  const auto r = renormalize(m);
  EXPECT_EQ(r.clamp_count, 1u);
  EXPECT_EQ(r.matrix.values(0, 1), 1.0);
  const auto raw = clamp_to_correlation(m);
  EXPECT_EQ(raw.clamp_count, 1u);
}

TEST(Renormalize, OutputAlwaysValidOnPartialBands) {
  std::mt19937_64 gen(12);
  const std::size_t n = 20;
  const auto e = eigendecompose(oracle::random_correlation(n, gen));
  for (std::size_t start : {1u, 2u}) {
    for (std::size_t end = start; end <= n; ++end) {
      const auto r = renormalize(reconstruct(e, {start, end}));
      EXPECT_NO_THROW(validate(r.matrix));
    }
  }
}

TEST(MatrixCsv, RoundTripsExactly) {
  std::mt19937_64 gen(6);
  const Matrix c = oracle::random_correlation(5, gen);
  std::stringstream s;
  write_matrix_csv(s, c, {"A", "B", "C", "D", "E"});
  const auto back = read_matrix_csv(s);
  EXPECT_EQ(back.values, c);
  EXPECT_EQ(back.labels.back(), "E");
}
