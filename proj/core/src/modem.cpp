// Copyright 2026 The WSDC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsdc/modem.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wsdc/errors.hpp"

namespace wsdc {

namespace {

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

int isqrt_exact(int k) {
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k))));
  return r * r == k ? r : -1;
}

}  // namespace

Constellation build_constellation(int order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    std::ostringstream os;
    os << "unsupported QAM order " << order << " (expected 4, 16, 64, or 256)";
    throw ConfigError(os.str());
  }
  Constellation c;
  c.order = order;
  c.side = isqrt_exact(order);
  c.bits_per_symbol = static_cast<int>(std::lround(std::log2(order)));
  // Levels {+-1, +-3, ...} scaled so the average symbol energy is exactly 1.
  c.scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);

  c.gray_of_pos.resize(c.side);
  c.pos_of_gray.resize(c.side);
  for (int p = 0; p < c.side; ++p) {
    const int g = p ^ (p >> 1);
    c.gray_of_pos[p] = g;
    c.pos_of_gray[g] = p;
  }

  const int half_bits = c.bits_per_symbol / 2;
  c.symbols.resize(order);
  for (int idx = 0; idx < order; ++idx) {
    const int gi = idx >> half_bits;
    const int gq = idx & ((1 << half_bits) - 1);
    c.symbols[idx] = Complex(c.level(c.pos_of_gray[gi]), c.level(c.pos_of_gray[gq]));
  }
  return c;
}

double ChannelConfig::noise_variance() const {
  if (noiseless()) return 0.0;
  return symbol_power / std::pow(10.0, snr_db / 10.0);
}

std::vector<Complex> modulate(std::span<const int> indices, const Constellation& c) {
  std::vector<Complex> out(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    const int idx = indices[i];
    if (idx < 0 || idx >= c.order) {
      std::ostringstream os;
      os << "modulate: index " << idx << " out of range [0, " << c.order << ")";
      throw ContractError(os.str());
    }
    out[i] = c.symbols[idx];
  }
  return out;
}

std::vector<Complex> awgn(std::span<const Complex> symbols, const ChannelConfig& cfg) {
  Rng rng(cfg.seed);
  return awgn(symbols, cfg.noise_variance(), rng);
}

std::vector<Complex> awgn(std::span<const Complex> symbols, double noise_variance,
                          Rng& rng) {
  std::vector<Complex> out(symbols.begin(), symbols.end());
  if (noise_variance <= 0.0) return out;
  const double per_dim = std::sqrt(noise_variance / 2.0);
  for (auto& s : out) {
    s += Complex(per_dim * rng.normal(), per_dim * rng.normal());
  }
  return out;
}

namespace {

// Nearest axis level with ties toward the smaller Gray code; returns the
// Gray bits. Per-axis minimization is equivalent to nearest-symbol search on
// a square lattice, and the smaller Gray code per axis yields the lowest
// combined index because the axes occupy disjoint bit ranges.
int slice_axis(double x, const Constellation& c) {
  double pos = (x / c.scale + (c.side - 1)) / 2.0;
  int lo = static_cast<int>(std::floor(pos));
  lo = std::max(0, std::min(lo, c.side - 2));
  const double d_lo = x - c.level(lo);
  const double d_hi = c.level(lo + 1) - x;
  if (d_lo < d_hi) return c.gray_of_pos[lo];
  if (d_hi < d_lo) return c.gray_of_pos[lo + 1];
  return std::min(c.gray_of_pos[lo], c.gray_of_pos[lo + 1]);
}

}  // namespace

std::vector<int> demodulate(std::span<const Complex> received, const Constellation& c) {
  const int half_bits = c.bits_per_symbol / 2;
  std::vector<int> out(received.size());
  for (size_t i = 0; i < received.size(); ++i) {
    const int gi = slice_axis(received[i].real(), c);
    const int gq = slice_axis(received[i].imag(), c);
    out[i] = (gi << half_bits) | gq;
  }
  return out;
}

double ser_theoretical(int order, double snr_db) {
  if (isqrt_exact(order) < 0) throw ConfigError("ser_theoretical: non-square order");
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  const double gamma_s = std::pow(10.0, snr_db / 10.0);
  const double root_k = std::sqrt(static_cast<double>(order));
  const double p = 2.0 * (1.0 - 1.0 / root_k) *
                   qfunc(std::sqrt(3.0 * gamma_s / (order - 1)));
  return 1.0 - (1.0 - p) * (1.0 - p);
}

double discrete_entropy(const Eigen::VectorXd& pmf) {
  if (pmf.size() == 0) throw ContractError("discrete_entropy: empty pmf");
  double sum = 0.0, h = 0.0;
  for (Eigen::Index i = 0; i < pmf.size(); ++i) {
    const double p = pmf[i];
    if (p < -1e-12 || !std::isfinite(p)) {
      throw ContractError("discrete_entropy: invalid pmf entry");
    }
    sum += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ContractError("discrete_entropy: pmf does not sum to 1");
  }
  return h;
}

double gaussian_cond_entropy(double sigma2) {
  if (!(sigma2 > 0.0)) throw ContractError("gaussian_cond_entropy: sigma^2 must be > 0");
  return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * sigma2);
}

double gaussian_output_entropy(double power, double sigma2) {
  if (power < 0.0) throw ContractError("gaussian_output_entropy: P* must be >= 0");
  if (!(sigma2 > 0.0)) throw ContractError("gaussian_output_entropy: sigma^2 must be > 0");
  return 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * (power + sigma2));
}

double capacity_awgn(double power, double sigma2) {
  if (power < 0.0) throw ContractError("capacity_awgn: P* must be >= 0");
  if (!(sigma2 > 0.0)) throw ContractError("capacity_awgn: sigma^2 must be > 0");
  return 0.5 * std::log2(1.0 + power / sigma2);
}

double capacity_awgn_complex(double power, double sigma2) {
  if (power < 0.0) throw ContractError("capacity_awgn_complex: P* must be >= 0");
  if (!(sigma2 > 0.0)) throw ContractError("capacity_awgn_complex: sigma^2 must be > 0");
  return std::log2(1.0 + power / sigma2);
}

}  // namespace wsdc
