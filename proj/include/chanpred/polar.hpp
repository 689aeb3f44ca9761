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

#include <cmath>
#include <complex>
#include <numbers>

namespace chanpred {

using cplx = std::complex<double>;

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double theta) noexcept
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(theta, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

/// A complex value carried as amplitude and phase.
///
/// Canonical form has amplitude >= 0 and phase in (-pi, pi]; a zero
/// amplitude carries phase 0.
struct PolarComplex {
    double amplitude{0.0};
    double phase{0.0};

    static PolarComplex from_rect(cplx z) noexcept
    {
        const double a = std::abs(z);
        return {a, a == 0.0 ? 0.0 : std::arg(z)};
    }

    cplx rect() const noexcept { return std::polar(amplitude, phase); }

    PolarComplex canonical() const noexcept
    {
        double a = amplitude;
        double p = phase;
        if (a < 0.0) {
            a = -a;
            p += std::numbers::pi;
        }
        if (a == 0.0) return {0.0, 0.0};
        return {a, wrap_phase(p)};
    }

    PolarComplex conj() const noexcept { return {amplitude, amplitude == 0.0 ? 0.0 : wrap_phase(-phase)}; }

    bool finite() const noexcept { return std::isfinite(amplitude) && std::isfinite(phase); }

    friend bool operator==(const PolarComplex&, const PolarComplex&) = default;
};

}  // namespace chanpred
