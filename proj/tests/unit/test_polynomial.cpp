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

#include "helpers.hpp"

#include <Eigen/Eigenvalues>

using namespace fieldlab_test;

namespace
{

// Greedy nearest matching of two root sets.
double max_root_distance(std::vector<Complex> a, std::vector<Complex> b)
{
    double worst = 0.0;
    for (const auto &x : a)
    {
        auto it = std::min_element(b.begin(), b.end(), [&](const Complex &l, const Complex &r) { return std::abs(l - x) < std::abs(r - x); });
        worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
        b.erase(it);
    }
    return worst;
}

std::vector<Complex> companion_roots(const std::vector<double> &monic_tail)
{
    const int n = static_cast<int>(monic_tail.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        c(0, i) = -monic_tail[i];
    for (int i = 1; i < n; ++i)
        c(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(c);
    std::vector<Complex> out;
    for (int i = 0; i < n; ++i)
        out.push_back(es.eigenvalues()(i));
    return out;
}

} // namespace

TEST_CASE("Horner evaluation and deflation", "[polynomial]")
{
    const std::vector<double> p{2.0, -3.0, 0.0, 5.0}; // 2x^3 - 3x^2 + 5
    CHECK(horner(p, 2.0) == 9.0);
    CHECK(horner_derivative(p, 2.0) == 12.0);
    CHECK(horner(p, Complex(0.0, 1.0)) == Complex(8.0, -2.0));

    const std::vector<double> cubic{1.0, -6.0, 11.0, -6.0}; // (x-1)(x-2)(x-3)
    const auto q = deflate(cubic, 3.0);
    CHECK(q == std::vector<double>{1.0, -3.0, 2.0});
    CHECK_THROWS_AS(deflate({1.0}, 1.0), Error);
}

TEST_CASE("cubic roots", "[polynomial]")
{
    const auto r = cubic_roots(-6.0, 11.0, -6.0);
    CHECK(max_root_distance({r.begin(), r.end()}, {1.0, 2.0, 3.0}) < 1e-12);
    const auto z = cubic_roots(0.0, 0.0, 0.0);
    for (const auto &x : z)
        CHECK(std::abs(x) == 0.0);
    // x^3 + 1
    const auto u = cubic_roots(0.0, 0.0, 1.0);
    CHECK(max_root_distance({u.begin(), u.end()}, {-1.0, std::polar(1.0, pi / 3), std::polar(1.0, -pi / 3)}) < 1e-14);
}

TEST_CASE("Ferrari quartic against companion eigenvalues", "[polynomial]")
{
    Rng rng(77);
    for (int i = 0; i < 500; ++i)
    {
        const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10), c = rng.uniform(-10, 10), d = rng.uniform(-10, 10);
        const auto r = quartic_roots(a, b, c, d);
        CHECK(max_root_distance({r.begin(), r.end()}, companion_roots({a, b, c, d})) < 1e-7);
    }
    SECTION("biquadratic branch")
    {
        // (x^2 - 1)(x^2 - 4)
        const auto r = quartic_roots(0.0, -5.0, 0.0, 4.0);
        CHECK(max_root_distance({r.begin(), r.end()}, {1.0, -1.0, 2.0, -2.0}) < 1e-14);
    }
    SECTION("repeated roots")
    {
        // (x - 1)^2 (x + 2)^2 = x^4 + 2x^3 - 3x^2 - 4x + 4
        const auto r = quartic_roots(2.0, -3.0, -4.0, 4.0);
        CHECK(max_root_distance({r.begin(), r.end()}, {1.0, 1.0, -2.0, -2.0}) < 1e-6);
    }
}

TEST_CASE("root polishing", "[polynomial]")
{
    const std::vector<double> p{1.0, 0.0, -2.0}; // x^2 - 2
    const Complex x = polish_root(p, Complex(1.4, 0.0));
    CHECK(std::abs(x - std::sqrt(2.0)) < 1e-15);
    const Complex y = polish_root(p, Complex(-1.0, 0.01));
    CHECK(std::abs(y + std::sqrt(2.0)) < 1e-12);
}
