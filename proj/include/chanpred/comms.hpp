// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chanpred/polar.hpp"

namespace chanpred {

/// CP-OFDM frame layout. One subframe carries one block of `ofdm_symbols`
/// symbols; a TDD frame is `subframes_per_frame` subframes.
struct OfdmConfig {
    std::size_t qpsk_symbols{12852};
    std::size_t subcarriers{2048};
    std::size_t guard_left{106};
    std::size_t guard_right{106};
    std::size_t ofdm_symbols{7};
    std::vector<std::size_t> cp_lengths{160, 144, 144, 144, 144, 144, 144};
    double tdd_subframe_s{0.000512};
    std::size_t samples_per_subframe{15360};
    std::size_t subframes_per_frame{10};
    double sample_rate_hz{3e7};

    std::size_t occupied() const noexcept { return subcarriers - guard_left - guard_right; }
    double frame_duration_s() const noexcept { return tdd_subframe_s * static_cast<double>(subframes_per_frame); }
    /// Sample offset of the first useful (post-CP) sample of symbol i.
    std::size_t useful_start(std::size_t i) const;
    /// FFT bin of occupied subcarrier index i (0 is the lowest frequency).
    std::size_t bin_of(std::size_t i) const noexcept;
    void validate() const;
};

/// Gray map: bit pair (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt 2.
std::vector<cplx> qpsk_mod(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> qpsk_demod(std::span<const cplx> symbols);

/// Maps up to qpsk_symbols symbols onto the grid (unused cells are zero) and
/// returns one subframe of time samples. The DFT pair is unitary.
std::vector<cplx> ofdm_mod(std::span<const cplx> qpsk, const OfdmConfig& cfg);
/// Inverse of ofdm_mod; returns exactly qpsk_symbols grid values.
std::vector<cplx> ofdm_demod(std::span<const cplx> samples, const OfdmConfig& cfg);

/// Grid cell -> OFDM symbol index for a demodulated vector.
inline std::size_t symbol_of_cell(std::size_t cell, const OfdmConfig& cfg) { return cell / cfg.occupied(); }

inline constexpr double kErasureThreshold = 1e-9;

struct Compensated {
    std::vector<cplx> symbols;
    std::vector<bool> erased;
};

/// Zero-forcing division by the aligned channel values; channel values below
/// kErasureThreshold in magnitude mark the symbol erased.
Compensated compensate(std::span<const cplx> rx, std::span<const cplx> channel);

/// Bit errors; both bits of an erased symbol count as errors.
std::uint64_t count_bit_errors(std::span<const std::uint8_t> sent, const Compensated& rx);

double q_function(double x);
/// Q(sqrt(2 Eb/N0)).
double qpsk_ber_theory(double ebn0_db);
/// Per-sample complex noise power for unit-energy QPSK symbols through the
/// unitary DFT: N0 = Eb / (Eb/N0) with Eb = 1/2. CP energy is not counted.
double noise_power_for_ebn0(double ebn0_db);

struct BerResult {
    std::string method;
    double ebn0_db{0.0};
    std::uint64_t bit_errors{0};
    std::uint64_t total_bits{0};
    double ber{0.0};
};

std::vector<std::uint8_t> random_bits(std::size_t n, std::mt19937_64& rng);

}  // namespace chanpred
