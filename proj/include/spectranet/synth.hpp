#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spectranet/market_data.hpp"

namespace spectranet {

/// Parameters of the linear factor generators.
///
///   r_jt = beta_j m_t + group_beta g_{c(j),t} + idio_sigma eps_jt
///
/// with m, g, eps i.i.d. standard normal and beta_j uniform on
/// [beta_low, beta_high). n_groups = 0 gives the one-factor model.
struct FactorSpec {
  std::size_t n = 100;
  std::size_t t = 1000;
  std::size_t n_groups = 0;
  double beta_low = 0.8;
  double beta_high = 1.2;
  double group_beta = 0.0;
  double idio_sigma = 1.0;
  std::uint64_t seed = 1;
};

void validate(const FactorSpec& spec);

struct FactorPanel {
  ReturnPanel panel;
  std::vector<double> betas;
  /// Group of each stock; empty for the one-factor model.
  std::vector<std::size_t> groups;
};

/// Pure noise: n x t i.i.d. standard normals, drawn row-major in time order.
/// Tickers are S000, S001, ...; dates are consecutive days from 2000-01-02.
ReturnPanel gen_noise(std::size_t n, std::size_t t, std::uint64_t seed);

/// One-factor panel. Draw order from the seed: the n betas, then for each
/// day the market draw followed by the n idiosyncratic draws.
FactorPanel gen_one_factor(const FactorSpec& spec);

/// Market plus one factor per contiguous block of stocks. Group factors come
/// from a separate stream derived from the seed, so the market, beta and
/// idiosyncratic draws match gen_one_factor for the same seed and
/// group_beta = 0 reproduces it exactly.
FactorPanel gen_block_factor(const FactorSpec& spec);

}  // namespace spectranet
