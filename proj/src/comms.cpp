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

#include "chanpred/comms.hpp"

#include <cmath>
#include <numeric>

#include "chanpred/error.hpp"
#include "chanpred/fft.hpp"

namespace chanpred {

std::size_t OfdmConfig::useful_start(std::size_t i) const
{
    std::size_t off = 0;
    for (std::size_t s = 0; s < i; ++s) off += cp_lengths[s] + subcarriers;
    return off + cp_lengths[i];
}

std::size_t OfdmConfig::bin_of(std::size_t i) const noexcept
{
    // occupied band is centred on DC
    const auto n = static_cast<std::ptrdiff_t>(subcarriers);
    const std::ptrdiff_t f = static_cast<std::ptrdiff_t>(i + guard_left) - n / 2;
    return static_cast<std::size_t>((f + n) % n);
}

void OfdmConfig::validate() const
{
    if (subcarriers == 0 || guard_left + guard_right >= subcarriers) throw ConfigError("ofdm: guards leave no subcarriers");
    if (cp_lengths.size() != ofdm_symbols) throw ConfigError("ofdm: need one CP length per OFDM symbol");
    if (occupied() * ofdm_symbols < qpsk_symbols) throw ConfigError("ofdm: grid smaller than the QPSK payload");
    const std::size_t total = std::accumulate(cp_lengths.begin(), cp_lengths.end(), ofdm_symbols * subcarriers);
    if (total != samples_per_subframe) throw ConfigError("ofdm: symbols and CPs do not fill the subframe");
    if (std::abs(static_cast<double>(samples_per_subframe) / sample_rate_hz - tdd_subframe_s) > 1e-12)
        throw ConfigError("ofdm: subframe duration inconsistent with the sample rate");
    if (subframes_per_frame == 0) throw ConfigError("ofdm: subframes_per_frame must be >= 1");
}

std::vector<cplx> qpsk_mod(std::span<const std::uint8_t> bits)
{
    if (bits.size() % 2 != 0) throw PreconditionError("qpsk_mod: odd bit count");
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<cplx> out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = cplx(bits[2 * i] ? -s : s, bits[2 * i + 1] ? -s : s);
    return out;
}

std::vector<std::uint8_t> qpsk_demod(std::span<const cplx> symbols)
{
    std::vector<std::uint8_t> bits(2 * symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        bits[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
        bits[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

std::vector<cplx> ofdm_mod(std::span<const cplx> qpsk, const OfdmConfig& cfg)
{
    cfg.validate();
    if (qpsk.size() > cfg.qpsk_symbols) throw PreconditionError("ofdm_mod: payload exceeds the grid");
    const Fft& fft = fft_for(cfg.subcarriers);
    const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.subcarriers));
    const std::size_t occ = cfg.occupied();

    std::vector<cplx> out(cfg.samples_per_subframe);
    std::vector<cplx> buf(cfg.subcarriers);
    for (std::size_t s = 0; s < cfg.ofdm_symbols; ++s) {
        std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
        for (std::size_t i = 0; i < occ; ++i) {
            const std::size_t cell = s * occ + i;
            if (cell < qpsk.size()) buf[cfg.bin_of(i)] = qpsk[cell];
        }
        fft.inverse(buf);
        const std::size_t start = cfg.useful_start(s);
        const std::size_t cp = cfg.cp_lengths[s];
        for (std::size_t n = 0; n < cfg.subcarriers; ++n) out[start + n] = buf[n] * norm;
        for (std::size_t n = 0; n < cp; ++n) out[start - cp + n] = out[start + cfg.subcarriers - cp + n];
    }
    return out;
}

std::vector<cplx> ofdm_demod(std::span<const cplx> samples, const OfdmConfig& cfg)
{
    cfg.validate();
    if (samples.size() != cfg.samples_per_subframe) throw ShapeError("ofdm_demod: expected one subframe of samples");
    const Fft& fft = fft_for(cfg.subcarriers);
    const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.subcarriers));
    const std::size_t occ = cfg.occupied();

    std::vector<cplx> out(cfg.qpsk_symbols);
    std::vector<cplx> buf(cfg.subcarriers);
    for (std::size_t s = 0; s < cfg.ofdm_symbols; ++s) {
        const std::size_t start = cfg.useful_start(s);
        std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(start), cfg.subcarriers, buf.begin());
        fft.forward(buf);
        for (std::size_t i = 0; i < occ; ++i) {
            const std::size_t cell = s * occ + i;
            if (cell < out.size()) out[cell] = buf[cfg.bin_of(i)] * norm;
        }
    }
    return out;
}

Compensated compensate(std::span<const cplx> rx, std::span<const cplx> channel)
{
    if (rx.size() != channel.size()) throw ShapeError("compensate: channel values not aligned with symbols");
    Compensated c;
    c.symbols.resize(rx.size());
    c.erased.assign(rx.size(), false);
    for (std::size_t i = 0; i < rx.size(); ++i) {
        if (std::abs(channel[i]) < kErasureThreshold) {
            c.erased[i] = true;
            c.symbols[i] = 0.0;
        } else {
            c.symbols[i] = rx[i] / channel[i];
        }
    }
    return c;
}

std::uint64_t count_bit_errors(std::span<const std::uint8_t> sent, const Compensated& rx)
{
    if (sent.size() != 2 * rx.symbols.size()) throw ShapeError("count_bit_errors: bit and symbol counts differ");
    const auto bits = qpsk_demod(rx.symbols);
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < rx.symbols.size(); ++i) {
        if (rx.erased[i]) {
            errors += 2;
            continue;
        }
        errors += (bits[2 * i] != sent[2 * i]) + (bits[2 * i + 1] != sent[2 * i + 1]);
    }
    return errors;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qpsk_ber_theory(double ebn0_db) { return q_function(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0))); }

double noise_power_for_ebn0(double ebn0_db) { return 0.5 / std::pow(10.0, ebn0_db / 10.0); }

std::vector<std::uint8_t> random_bits(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; i += 64) {
        const std::uint64_t word = rng();
        for (std::size_t b = 0; b < 64 && i + b < n; ++b) bits[i + b] = static_cast<std::uint8_t>((word >> b) & 1u);
    }
    return bits;
}

}  // namespace chanpred
