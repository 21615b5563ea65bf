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

#ifndef WSDC_MODEM_HPP_
#define WSDC_MODEM_HPP_

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "wsdc/rng.hpp"

namespace wsdc {

using Complex = std::complex<double>;

// Gray-coded square K-QAM with unit average symbol energy. Index bits split
// high-half -> in-phase axis, low-half -> quadrature axis; each axis uses a
// binary-reflected Gray code over the amplitude levels ordered from most
// negative to most positive.
struct Constellation {
  int order = 0;                  // K
  int bits_per_symbol = 0;        // log2 K
  int side = 0;                   // sqrt(K) amplitude levels per axis
  double scale = 0.0;             // level spacing normalizer
  std::vector<Complex> symbols;   // index -> symbol
  std::vector<int> gray_of_pos;   // axis level position -> gray code
  std::vector<int> pos_of_gray;   // gray code -> axis level position

  double level(int pos) const { return scale * (2.0 * pos - (side - 1)); }
};

Constellation build_constellation(int order);

struct ChannelConfig {
  double snr_db = 12.0;        // Es/N0 in dB; +inf means noiseless
  uint64_t seed = 0;
  double symbol_power = 1.0;   // P*, fixed by constellation normalization

  bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
  // Total complex noise variance P* / 10^(snr_db / 10).
  double noise_variance() const;
};

std::vector<Complex> modulate(std::span<const int> indices, const Constellation& c);

// Adds circularly-symmetric complex Gaussian noise, variance sigma^2 / 2 per
// real dimension. The config-seeded overload is reproducible per call; the
// streaming overload draws from a caller-owned generator.
std::vector<Complex> awgn(std::span<const Complex> symbols, const ChannelConfig& cfg);
std::vector<Complex> awgn(std::span<const Complex> symbols, double noise_variance,
                          Rng& rng);

// Minimum-distance demodulation; ties resolve to the lowest symbol index.
std::vector<int> demodulate(std::span<const Complex> received, const Constellation& c);

// Closed-form square-QAM symbol error rate on AWGN.
double ser_theoretical(int order, double snr_db);

// H(pmf) in bits, 0 log 0 := 0.
double discrete_entropy(const Eigen::VectorXd& pmf);

// H(S_hat | S) = 1/2 log2(2 pi e sigma^2) for the real Gaussian channel.
double gaussian_cond_entropy(double sigma2);

// H(S_hat) = 1/2 log2(2 pi e (P* + sigma^2)) under a Gaussian input.
double gaussian_output_entropy(double power, double sigma2);

// C = 1/2 log2(1 + P*/sigma^2), the real-channel form; identically the
// difference of the two entropies above.
double capacity_awgn(double power, double sigma2);

// Complex-channel convenience, log2(1 + P*/sigma^2). Not used by the
// capacity identity checks, which follow the real-channel derivation.
double capacity_awgn_complex(double power, double sigma2);

}  // namespace wsdc

#endif  // WSDC_MODEM_HPP_
