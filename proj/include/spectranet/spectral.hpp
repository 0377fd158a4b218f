#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spectranet/market_data.hpp"
#include "spectranet/matrix.hpp"

namespace spectranet {

/// Symmetric matrix with unit diagonal and entries in [-1, 1]. Labels are
/// optional (empty when the matrix did not come from a panel).
struct CorrelationMatrix {
  std::vector<std::string> tickers;
  Matrix values;

  std::size_t n() const { return values.rows(); }
};

/// Throws InputError unless c is symmetric and has unit diagonal (both to
/// 1e-12) and all entries lie in [-1, 1].
void validate(const CorrelationMatrix& c);

/// Pearson correlation of the panel rows. The upper triangle is computed and
/// mirrored, the diagonal is set to exactly 1 and rounding overshoot beyond
/// +-1 is clamped. Scale-invariant per row, so raw and standardized returns
/// give the same matrix.
CorrelationMatrix correlation(const ReturnPanel& panel);

/// Eigenvalues in descending order; column k of `eigenvectors` is the unit
/// eigenvector for eigenvalues[k].
struct EigenSystem {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  int sweeps = 0;
  double off_diagonal_norm = 0.0;

  std::size_t n() const { return eigenvalues.size(); }
};

struct JacobiOptions {
  int max_sweeps = 100;
  /// Convergence when the off-diagonal Frobenius norm drops below
  /// tolerance_per_row * N * max(1, |A|_F / N).
  double tolerance_per_row = 1e-12;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted descending; ties keep the order in which they left
/// the Jacobi iteration, so the basis inside a degenerate cluster is whatever
/// the solver produced. Each eigenvector is signed so that its largest
/// magnitude entry (first one on ties) is positive, which makes the result a
/// deterministic function of the input bits.
///
/// Throws NumericalError, carrying the achieved off-diagonal norm, when the
/// sweep cap is hit.
EigenSystem eigendecompose(const Matrix& symmetric, const JacobiOptions& options = {});
EigenSystem eigendecompose(const CorrelationMatrix& c, const JacobiOptions& options = {});

/// Marchenko-Pastur edges for a standardized N x T noise panel.
struct RMTBounds {
  double q = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
};

/// q = t / n and lambda_pm = 1 + 1/q +- 2 sqrt(1/q). Requires t > n >= 2.
RMTBounds rmt_bounds(std::size_t n, std::size_t t);

/// Inclusive 1-based range [start, end] into the descending eigenvalues.
struct SpectralBand {
  std::size_t start = 1;
  std::size_t end = 1;

  std::size_t size() const { return end - start + 1; }
  friend bool operator==(const SpectralBand&, const SpectralBand&) = default;
};

void validate(const SpectralBand& band, std::size_t n);

/// Raw partial sum over the band of lambda_k v_k v_k^T. Not a correlation
/// matrix in general; see renormalize. Terms are accumulated in ascending k,
/// the same order ReconstructionAccumulator uses, so both give identical bits.
Matrix reconstruct(const EigenSystem& eig, const SpectralBand& band);

/// Builds reconstruct(eig, (start, end)) for increasing `end` by adding one
/// rank-one term per step.
class ReconstructionAccumulator {
 public:
  ReconstructionAccumulator(const EigenSystem& eig, std::size_t start);

  /// Adds terms up to and including `end` (1-based, >= current end).
  const Matrix& extend_to(std::size_t end);

  const Matrix& current() const { return sum_; }
  SpectralBand band() const { return {start_, end_}; }

 private:
  void add_term(std::size_t k);

  const EigenSystem* eig_;
  std::size_t start_;
  std::size_t end_;
  Matrix sum_;
};

struct Renormalized {
  CorrelationMatrix matrix;
  std::size_t clamp_count = 0;
};

/// out_ij = m_ij / sqrt(m_ii m_jj) with an exact unit diagonal and
/// off-diagonals clamped to [-1, 1]. clamp_count counts clamped entries in
/// the upper triangle. Throws InputError naming the first stock whose
/// diagonal entry is not positive.
Renormalized renormalize(const Matrix& m);

/// Keeps the raw off-diagonals, clamped to [-1, 1], and forces the diagonal
/// to 1. This is how the sweep turns band sums into tree input by default.
Renormalized clamp_to_correlation(const Matrix& m);

}  // namespace spectranet
