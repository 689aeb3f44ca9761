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

#include "chanpred/fft.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace chanpred {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Fft::Fft(std::size_t n) : n_(n)
{
    if (n == 0) throw std::invalid_argument("Fft: size must be >= 1");
    std::vector<cplx> scratch(n);
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    inverse_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("Fft: FFTW planning failed");
}

Fft::~Fft()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft::forward(std::span<cplx> data) const
{
    if (data.size() != n_) throw std::invalid_argument("Fft::forward: size mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

void Fft::inverse(std::span<cplx> data) const
{
    if (data.size() != n_) throw std::invalid_argument("Fft::inverse: size mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

const Fft& fft_for(std::size_t n)
{
    thread_local std::unordered_map<std::size_t, std::unique_ptr<Fft>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft>(n);
    return *slot;
}

std::size_t next_pow2(std::size_t n) noexcept
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace chanpred
