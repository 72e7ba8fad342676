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

using namespace fieldlab_test;

namespace
{

struct Scenario
{
    SystemConfig cfg;
    ChannelSet set;
    PilotFrame frame;
    PafTerms terms;
};

Scenario scenario(std::uint64_t seed, double sigma2_bs_dbm, double sigma2_irs_dbm)
{
    Scenario s{};
    s.cfg.sigma2_bs_w = dbm_to_watts(sigma2_bs_dbm);
    s.cfg.sigma2_irs_w = dbm_to_watts(sigma2_irs_dbm);
    Rng rng(seed);
    s.set = draw_channels(s.cfg, rng);
    s.frame = design_pilots(s.cfg.n(), s.cfg.q1, rng.next_u64());
    s.terms = paf_terms(s.set, s.frame);
    return s;
}

PafCoefficients coefficients(const Scenario &s)
{
    return mse_coefficients(s.cfg.total_power_w, s.cfg.sigma2_bs_w, s.cfg.sigma2_irs_w, s.terms);
}

} // namespace

TEST_CASE("MSE coefficients", "[power_alloc]")
{
    const Scenario s = scenario(1, -70, -70);
    const PafCoefficients c = coefficients(s);
    CHECK(c.a2 > 0.0);
    CHECK(c.b == -s.cfg.n() * s.cfg.total_power_w * s.cfg.total_power_w);

    const PafCoefficients quiet = mse_coefficients(s.cfg.total_power_w, s.cfg.sigma2_bs_w, 0.0, s.terms);
    CHECK(quiet.a2 == 0.0);
    CHECK(quiet.a1 > 0.0);

    Rng rng(2);
    for (int i = 0; i < 100; ++i)
    {
        const double beta = rng.uniform(1e-3, 1.0 - 1e-3);
        const double direct = mse_beta_direct(beta, s.cfg.total_power_w, s.cfg.sigma2_bs_w, s.cfg.sigma2_irs_w, s.terms);
        CHECK(rel_diff(mse_beta(c, beta), direct) < 1e-9);
    }

    // coefficient MSE is the LS expected error at the configured beta
    CHECK(rel_diff(analytic_mse_beta(s.cfg, s.set, s.frame, s.cfg.beta), analytic_mse(s.cfg, s.set, s.frame)) < 1e-9);

    CHECK(mse_beta(c, 1e-9) > 1e3 * mse_beta(c, 0.5));
    CHECK(mse_beta(c, 1.0 - 1e-9) > 1e3 * mse_beta(c, 0.5));
    CHECK_THROWS_AS(mse_beta(c, 0.0), Error);
    CHECK_THROWS_AS(mse_beta(c, 1.0), Error);
}

TEST_CASE("optimal beta against grid search", "[power_alloc]")
{
    const int grid = 10000;
    const double step = 1.0 / grid;
    Rng seeds(9);
    for (int i = 0; i < 50; ++i)
    {
        // alternate noise regimes
        const double irs_dbm = i % 2 == 0 ? -60.0 : -105.0;
        const Scenario s = scenario(seeds.next_u64(), -70.0, irs_dbm);
        const PafCoefficients c = coefficients(s);
        const PafSolution sol = optimal_beta(c);
        double best_b = 0.0, best = std::numeric_limits<double>::infinity();
        for (int g = 1; g < grid; ++g)
        {
            const double e = mse_beta(c, g * step);
            if (e < best)
            {
                best = e;
                best_b = g * step;
            }
        }
        CHECK(std::abs(sol.beta_opt - best_b) <= step);
        CHECK(sol.mse_at_opt <= best * (1.0 + 1e-12));
        for (double cand : sol.candidates)
            CHECK(sol.mse_at_opt <= mse_beta(c, cand));

        // stationarity, relative to the curvature scale
        const double h = 1e-6;
        const double d = (mse_beta(c, sol.beta_opt + h) - mse_beta(c, sol.beta_opt - h)) / (2 * h);
        CHECK(std::abs(d) * sol.beta_opt / sol.mse_at_opt < 1e-6);

        if (i % 2 == 0)
            CHECK(sol.beta_opt > 0.5);
        else
            CHECK(sol.beta_opt < 0.5);
    }
}

TEST_CASE("optimal beta root forms", "[power_alloc]")
{
    SECTION("balanced coefficients give one half")
    {
        const auto sol = optimal_beta({0.0, 2.0, -3.0});
        CHECK(sol.beta_opt == 0.5);
        CHECK(sol.candidates.size() == 1);
    }

    SECTION("no interior stationary point")
    {
        try
        {
            optimal_beta({1.0, 0.0, -1.0});
            FAIL("expected no_candidate");
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::no_candidate);
        }
        CHECK_THROWS_AS(optimal_beta({std::nan(""), 1.0, -1.0}), Error);
    }

    SECTION("roots agree with an extended-precision solve")
    {
        Rng rng(4);
        for (int i = 0; i < 200; ++i)
        {
            // a1 spans many decades, both signs, with a1 > -a2 so a real root exists
            const double a2 = std::pow(10.0, rng.uniform(-30, -10));
            const double a1 = a2 * (rng.uniform() < 0.5 ? -rng.uniform(0.0, 0.999) : std::pow(10.0, rng.uniform(-8, 8)));
            const auto sol = optimal_beta({a1, a2, -1.0});
            const long double la1 = a1, la2 = a2;
            const long double ref = (-la2 + std::sqrt(la2 * la2 + la1 * la2)) / la1;
            // for small |a1| the long-double textbook form itself cancels; compare with the series
            const long double x = la1 / la2;
            const long double series = 0.5L - x / 8.0L + x * x / 16.0L;
            const long double expect = std::abs(a1 / a2) < 1e-4 ? series : ref;
            CHECK(std::abs(static_cast<long double>(sol.beta_opt) - expect) / expect < 1e-10L);
        }
    }
}

TEST_CASE("noise regimes", "[power_alloc]")
{
    // more IRS noise pushes power towards the devices
    std::vector<double> betas;
    for (double irs_dbm : {-110.0, -100.0, -90.0, -80.0, -70.0, -60.0})
        betas.push_back(optimal_beta(coefficients(scenario(5, -70.0, irs_dbm))).beta_opt);
    for (std::size_t i = 1; i < betas.size(); ++i)
        CHECK(betas[i] > betas[i - 1]);
    CHECK(betas.back() > 0.5);
    CHECK(betas.front() < 0.5);

    // the sign of a1 sets the regime
    for (std::uint64_t seed = 10; seed < 30; ++seed)
    {
        const Scenario s = scenario(seed, -70.0, -70.0 - static_cast<double>(seed));
        const PafCoefficients c = coefficients(s);
        const double b = optimal_beta(c).beta_opt;
        CHECK((c.a1 < 0.0) == (b > 0.5));
    }
}
