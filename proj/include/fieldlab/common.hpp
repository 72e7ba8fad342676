// SPDX-License-Identifier: Apache-2.0
//
// fieldlab: simulation and estimation toolkit for active-IRS hybrid-field channels
// Copyright (C) 2026 The fieldlab authors
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
// ------------------------------------------------------------------------

#ifndef FIELDLAB_COMMON_HPP
#define FIELDLAB_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fieldlab
{

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex j{0.0, 1.0};

// Machine-readable failure categories; the CLI reports them verbatim.
enum class ErrorCode
{
    invalid_argument,
    out_of_range,
    dimension_mismatch,
    rank_deficient,
    no_candidate,
    convergence,
    io_failure,
    version_mismatch,
    truncated,
    digest_mismatch,
    shape_mismatch,
    id_mismatch,
    empty_split,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::no_candidate: return "no_candidate";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::digest_mismatch: return "digest_mismatch";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::id_mismatch: return "id_mismatch";
    case ErrorCode::empty_split: return "empty_split";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string &what)
{
    if (!condition)
        throw Error(code, what);
}

// Symmetric element offsets of an n-element axis: -(n-1)/2, ..., (n-1)/2.
// Odd n gives integer offsets, even n half-integers.
inline double centered_offset(int index, int n)
{
    return static_cast<double>(index) - 0.5 * static_cast<double>(n - 1);
}

inline bool is_centered_offset(double offset, int n)
{
    const double index = offset + 0.5 * static_cast<double>(n - 1);
    return n >= 1 && index >= -1e-9 && index <= n - 1 + 1e-9 &&
           std::abs(index - std::round(index)) < 1e-9;
}

} // namespace fieldlab

#endif
