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

#ifndef FIELDLAB_POLYNOMIAL_HPP
#define FIELDLAB_POLYNOMIAL_HPP

#include "common.hpp"

#include <array>
#include <vector>

namespace fieldlab
{

// Coefficients are stored highest degree first.
template <typename T>
T horner(const std::vector<double> &coef, T x)
{
    T acc = T(0);
    for (double c : coef)
        acc = acc * x + c;
    return acc;
}

template <typename T>
T horner_derivative(const std::vector<double> &coef, T x)
{
    T acc = T(0);
    const auto deg = static_cast<int>(coef.size()) - 1;
    for (int i = 0; i < deg; ++i)
        acc = acc * x + coef[i] * static_cast<double>(deg - i);
    return acc;
}

// Divides out (x - root); the remainder is dropped.
inline std::vector<double> deflate(const std::vector<double> &coef, double root)
{
    require(coef.size() >= 2, ErrorCode::invalid_argument, "cannot deflate a constant");
    std::vector<double> out(coef.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < coef.size(); ++i)
    {
        acc = acc * root + coef[i];
        out[i] = acc;
    }
    return out;
}

// Roots of x^3 + a x^2 + b x + c (Cardano, complex arithmetic).
inline std::array<Complex, 3> cubic_roots(Complex a, Complex b, Complex c)
{
    const Complex p = b - a * a / 3.0;
    const Complex q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    Complex u3 = -q / 2.0 + disc;
    if (std::abs(-q / 2.0 - disc) > std::abs(u3))
        u3 = -q / 2.0 - disc;
    const Complex omega = std::polar(1.0, 2.0 * pi / 3.0);
    std::array<Complex, 3> t{};
    if (std::abs(u3) == 0.0)
        t = {Complex(0.0), Complex(0.0), Complex(0.0)};
    else
    {
        Complex u = std::pow(u3, 1.0 / 3.0);
        for (auto &ti : t)
        {
            ti = u - p / (3.0 * u);
            u *= omega;
        }
    }
    for (auto &ti : t)
        ti -= a / 3.0;
    return t;
}

// Roots of x^4 + a x^3 + b x^2 + c x + d by Ferrari's method.
inline std::array<Complex, 4> quartic_roots(Complex a, Complex b, Complex c, Complex d)
{
    // depressed y^4 + p y^2 + q y + r, x = y - a/4
    const Complex a2 = a * a;
    const Complex p = b - 3.0 * a2 / 8.0;
    const Complex q = c - a * b / 2.0 + a2 * a / 8.0;
    const Complex r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    std::array<Complex, 4> y{};
    if (std::abs(q) <= 1e-14 * (std::abs(p) * std::abs(p) + std::abs(r) + 1e-300))
    {
        // biquadratic
        const Complex s = std::sqrt(p * p - 4.0 * r);
        const Complex z1 = (-p + s) / 2.0, z2 = (-p - s) / 2.0;
        y = {std::sqrt(z1), -std::sqrt(z1), std::sqrt(z2), -std::sqrt(z2)};
    }
    else
    {
        // resolvent 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0; largest |m| for stability
        const auto ms = cubic_roots(p, (p * p - 4.0 * r) / 4.0, -q * q / 8.0);
        Complex m = ms[0];
        for (const auto &mi : ms)
            if (std::abs(mi) > std::abs(m))
                m = mi;
        const Complex s = std::sqrt(2.0 * m);
        const Complex shift = q / (2.0 * s);
        // y^2 - s y + (p/2 + m + q/(2s)) = 0 and y^2 + s y + (p/2 + m - q/(2s)) = 0
        const Complex c1 = p / 2.0 + m + shift, c2 = p / 2.0 + m - shift;
        const Complex d1 = std::sqrt(s * s - 4.0 * c1), d2 = std::sqrt(s * s - 4.0 * c2);
        y = {(s + d1) / 2.0, (s - d1) / 2.0, (-s + d2) / 2.0, (-s - d2) / 2.0};
    }
    for (auto &yi : y)
        yi -= a / 4.0;
    return y;
}

// Newton iterations on a complex root, used to polish closed-form roots.
inline Complex polish_root(const std::vector<double> &coef, Complex x, int iterations = 8)
{
    for (int i = 0; i < iterations; ++i)
    {
        const Complex d = horner_derivative(coef, x);
        if (std::abs(d) == 0.0)
            break;
        const Complex step = horner(coef, x) / d;
        const Complex next = x - step;
        if (std::abs(horner(coef, next)) > std::abs(horner(coef, x)))
            break;
        x = next;
        if (std::abs(step) <= 1e-16 * std::abs(x))
            break;
    }
    return x;
}

} // namespace fieldlab

#endif
