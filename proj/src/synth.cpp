#include "spectranet/synth.hpp"

#include <cmath>
#include <cstdio>

#include "spectranet/errors.hpp"
#include "spectranet/rng.hpp"

namespace spectranet {

namespace {

constexpr std::uint64_t kGroupStreamSalt = 0x6A09E667F3BCC909ULL;

ReturnPanel empty_panel(std::size_t n, std::size_t t) {
  ReturnPanel panel;
  panel.returns = Matrix(n, t);
  panel.tickers.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, n <= 1000 ? "S%03zu" : "S%zu", j);
    panel.tickers.emplace_back(buf);
  }
  Date d = Date::parse("2000-01-02");
  panel.dates.reserve(t);
  for (std::size_t k = 0; k < t; ++k, d = d.next_day()) panel.dates.push_back(d);
  return panel;
}

FactorPanel generate(const FactorSpec& spec) {
  validate(spec);
  FactorPanel out;
  out.panel = empty_panel(spec.n, spec.t);
  Rng rng(spec.seed);
  out.betas.reserve(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) out.betas.push_back(rng.uniform(spec.beta_low, spec.beta_high));

  std::vector<double> group_draws(spec.n_groups);
  std::uint64_t group_seed = spec.seed ^ kGroupStreamSalt;
  Rng group_rng(splitmix64(group_seed));
  if (spec.n_groups > 0) {
    out.groups.resize(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) out.groups[j] = j * spec.n_groups / spec.n;
  }

  auto& r = out.panel.returns;
  for (std::size_t k = 0; k < spec.t; ++k) {
    const double market = rng.normal();
    for (auto& g : group_draws) g = group_rng.normal();
    for (std::size_t j = 0; j < spec.n; ++j) {
      double value = out.betas[j] * market;
      if (spec.n_groups > 0) value += spec.group_beta * group_draws[out.groups[j]];
      value += spec.idio_sigma * rng.normal();
      r(j, k) = value;
    }
  }
  return out;
}

}  // namespace

void validate(const FactorSpec& spec) {
  if (spec.n < 2 || spec.t < 2) throw ConfigError("factor spec: need n >= 2 and t >= 2");
  if (!(spec.beta_low > 0.0) || !(spec.beta_low <= spec.beta_high)) {
    throw ConfigError("factor spec: beta range must satisfy 0 < low <= high");
  }
  if (!(spec.idio_sigma > 0.0)) throw ConfigError("factor spec: idio_sigma must be positive");
  if (spec.group_beta < 0.0) throw ConfigError("factor spec: group_beta must be non-negative");
}

ReturnPanel gen_noise(std::size_t n, std::size_t t, std::uint64_t seed) {
  if (n < 2 || t < 2) throw ConfigError("gen_noise: need n >= 2 and t >= 2");
  ReturnPanel panel = empty_panel(n, t);
  Rng rng(seed);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < t; ++k) panel.returns(j, k) = rng.normal();
  return panel;
}

FactorPanel gen_one_factor(const FactorSpec& spec) {
  if (spec.n_groups != 0) throw ConfigError("gen_one_factor: n_groups must be 0");
  return generate(spec);
}

FactorPanel gen_block_factor(const FactorSpec& spec) {
  if (spec.n_groups < 2) throw ConfigError("gen_block_factor: need at least 2 groups");
  if (spec.n / spec.n_groups < 2) {
    throw ConfigError("gen_block_factor: " + std::to_string(spec.n_groups) + " groups over " +
                      std::to_string(spec.n) + " stocks leaves a group with fewer than 2 members");
  }
  return generate(spec);
}

}  // namespace spectranet
