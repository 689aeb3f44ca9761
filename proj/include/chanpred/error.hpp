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

#include <stdexcept>
#include <string>

namespace chanpred {

/// Dimension mismatch between operands (weights, inputs, teachers).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value; `what()` names the offending field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was called on inputs that violate its precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Mobile user coincides with the base station or a scatterer.
/// Unreadable, unwritable or malformed data files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGeometryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace chanpred
