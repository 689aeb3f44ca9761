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
#include <span>

#include "chanpred/polar.hpp"

namespace chanpred {

/// Unnormalized in-place complex DFT of a fixed size, backed by FFTW.
/// Instances are cached per thread; use fft_for().
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const noexcept { return n_; }
    /// X_k = sum_n x_n exp(-2 pi j n k / N)
    void forward(std::span<cplx> data) const;
    /// x_n = sum_k X_k exp(+2 pi j n k / N), no 1/N factor
    void inverse(std::span<cplx> data) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* inverse_plan_;
};

const Fft& fft_for(std::size_t n);

std::size_t next_pow2(std::size_t n) noexcept;

}  // namespace chanpred
