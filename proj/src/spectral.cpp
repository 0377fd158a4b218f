#include "spectranet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectranet/errors.hpp"

namespace spectranet {

void validate(const CorrelationMatrix& c) {
  const auto& v = c.values;
  if (!v.is_square() || v.rows() == 0) throw InputError("correlation matrix must be square and non-empty");
  if (!c.tickers.empty() && c.tickers.size() != v.rows()) {
    throw InputError("correlation matrix labels do not match its size");
  }
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    if (std::abs(v(i, i) - 1.0) > kTol) {
      throw InputError("correlation matrix: diagonal entry " + std::to_string(i) + " is not 1");
    }
    for (std::size_t j = 0; j < v.cols(); ++j) {
      if (!(std::abs(v(i, j)) <= 1.0)) {
        throw InputError("correlation matrix: entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") outside [-1, 1]");
      }
      if (std::abs(v(i, j) - v(j, i)) > kTol) {
        throw InputError("correlation matrix: not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      }
    }
  }
}

CorrelationMatrix correlation(const ReturnPanel& panel) {
  validate(panel);
  const std::size_t n = panel.n();
  const std::size_t t = panel.t();

  Matrix centered(n, t);
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = panel.returns.row(j);
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(t);
    auto dst = centered.row(j);
    double ss = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
      dst[k] = row[k] - mean;
      ss += dst[k] * dst[k];
    }
    if (!(ss > 0.0)) throw InputError("correlation: zero variance for ticker " + panel.tickers[j]);
    norms[j] = std::sqrt(ss);
  }

  CorrelationMatrix c{panel.tickers, Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    c.values(i, i) = 1.0;
    const auto a = centered.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = centered.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < t; ++k) dot += a[k] * b[k];
      const double rho = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      c.values(i, j) = rho;
      c.values(j, i) = rho;
    }
  }
  return c;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) ss += a(i, j) * a(i, j);
  return std::sqrt(ss);
}

double frobenius_norm(const Matrix& a) {
  double ss = 0.0;
  for (double v : a.data()) ss += v * v;
  return std::sqrt(ss);
}

// One Jacobi rotation annihilating a(p, q), applied to both a and the
// accumulated eigenvector matrix v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    if (r != p && r != q) {
      const double arp = a(r, p);
      const double arq = a(r, q);
      const double new_rp = arp - s * (arq + tau * arp);
      const double new_rq = arq + s * (arp - tau * arq);
      a(r, p) = a(p, r) = new_rp;
      a(r, q) = a(q, r) = new_rq;
    }
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

}  // namespace

EigenSystem eigendecompose(const Matrix& symmetric, const JacobiOptions& options) {
  if (!symmetric.is_square() || symmetric.rows() == 0) {
    throw InputError("eigendecompose: matrix must be square and non-empty");
  }
  for (double x : symmetric.data()) {
    if (!std::isfinite(x)) throw InputError("eigendecompose: non-finite entry");
  }
  if (max_asymmetry(symmetric) > 1e-12 * std::max(1.0, frobenius_norm(symmetric))) {
    throw InputError("eigendecompose: matrix is not symmetric");
  }
  const std::size_t n = symmetric.rows();
  Matrix a = symmetric;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  Matrix v = Matrix::identity(n);

  const double nd = static_cast<double>(n);
  const double tol = options.tolerance_per_row * nd * std::max(1.0, frobenius_norm(a) / nd);

  int sweeps = 0;
  double off = off_diagonal_norm(a);
  while (off >= tol) {
    if (sweeps == options.max_sweeps) {
      throw NumericalError("eigendecompose: no convergence after " + std::to_string(sweeps) +
                           " sweeps (off-diagonal norm " + format_double(off) + ", tolerance " +
                           format_double(tol) + ")");
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (a(p, q) != 0.0) rotate(a, v, p, q);
    ++sweeps;
    off = off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenSystem out;
  out.sweeps = sweeps;
  out.off_diagonal_norm = off;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    std::size_t pivot = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(pivot, src))) pivot = r;
    const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = sign * v(r, src);
  }
  return out;
}

EigenSystem eigendecompose(const CorrelationMatrix& c, const JacobiOptions& options) {
  validate(c);
  return eigendecompose(c.values, options);
}

RMTBounds rmt_bounds(std::size_t n, std::size_t t) {
  if (n < 2) throw InputError("rmt_bounds: need at least 2 stocks");
  if (t <= n) {
    throw InputError("rmt_bounds: need more observations than stocks (T=" + std::to_string(t) +
                     ", N=" + std::to_string(n) + ")");
  }
  RMTBounds b;
  b.q = static_cast<double>(t) / static_cast<double>(n);
  const double inv_q = 1.0 / b.q;
  b.lambda_minus = 1.0 + inv_q - 2.0 * std::sqrt(inv_q);
  b.lambda_plus = 1.0 + inv_q + 2.0 * std::sqrt(inv_q);
  return b;
}

void validate(const SpectralBand& band, std::size_t n) {
  if (band.start < 1 || band.start > band.end || band.end > n) {
    throw InputError("spectral band (" + std::to_string(band.start) + ", " +
                     std::to_string(band.end) + ") invalid for " + std::to_string(n) +
                     " eigenvalues");
  }
}

ReconstructionAccumulator::ReconstructionAccumulator(const EigenSystem& eig, std::size_t start)
    : eig_(&eig), start_(start), end_(start - 1), sum_(eig.n(), eig.n()) {
  validate(SpectralBand{start, start}, eig.n());
}

void ReconstructionAccumulator::add_term(std::size_t k) {
  const std::size_t n = eig_->n();
  const double lambda = eig_->eigenvalues[k - 1];
  const Matrix& vec = eig_->eigenvectors;
  for (std::size_t i = 0; i < n; ++i) {
    const double li = lambda * vec(i, k - 1);
    for (std::size_t j = i; j < n; ++j) {
      sum_(i, j) += li * vec(j, k - 1);
      sum_(j, i) = sum_(i, j);
    }
  }
}

const Matrix& ReconstructionAccumulator::extend_to(std::size_t end) {
  validate(SpectralBand{start_, end}, eig_->n());
  if (end < end_) throw InputError("reconstruction accumulator cannot shrink its band");
  while (end_ < end) add_term(++end_);
  return sum_;
}

Matrix reconstruct(const EigenSystem& eig, const SpectralBand& band) {
  validate(band, eig.n());
  ReconstructionAccumulator acc(eig, band.start);
  return acc.extend_to(band.end);
}

Renormalized renormalize(const Matrix& m) {
  if (!m.is_square()) throw InputError("renormalize: matrix must be square");
  const std::size_t n = m.rows();
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(m(i, i) > 0.0)) {
      throw InputError("renormalize: non-positive diagonal entry for stock " + std::to_string(i) +
                       " (the band carries no weight on it)");
    }
    scale[i] = std::sqrt(m(i, i));
  }
  Renormalized out{{{}, Matrix(n, n)}, 0};
  auto& c = out.matrix.values;
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double rho = m(i, j) / (scale[i] * scale[j]);
      if (rho > 1.0 || rho < -1.0) {
        rho = std::clamp(rho, -1.0, 1.0);
        ++out.clamp_count;
      }
      c(i, j) = c(j, i) = rho;
    }
  }
  return out;
}

Renormalized clamp_to_correlation(const Matrix& m) {
  if (!m.is_square()) throw InputError("clamp_to_correlation: matrix must be square");
  const std::size_t n = m.rows();
  Renormalized out{{{}, Matrix(n, n)}, 0};
  auto& c = out.matrix.values;
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double rho = m(i, j);
      if (rho > 1.0 || rho < -1.0) {
        rho = std::clamp(rho, -1.0, 1.0);
        ++out.clamp_count;
      }
      c(i, j) = c(j, i) = rho;
    }
  }
  return out;
}

}  // namespace spectranet
