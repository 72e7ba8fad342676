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

#ifndef FIELDLAB_POWER_ALLOC_HPP
#define FIELDLAB_POWER_ALLOC_HPP

#include "estimators.hpp"

#include <algorithm>
#include <vector>

namespace fieldlab
{

// MSE(beta) = (a1 beta + a2) / (b beta^2 - b beta)
struct PafCoefficients
{
    double a1 = 0.0;
    double a2 = 0.0;
    double b = -1.0;
};

struct PafSolution
{
    double beta_opt = 0.5;
    std::vector<double> candidates; // stationary points inside (0, 1)
    double mse_at_opt = 0.0;
};

// Scenario quantities entering the coefficients.
struct PafTerms
{
    double reflected = 0.0; // ||F_p theta||^2
    LsErrorTerms ls{};
    int n = 1;
};

inline PafTerms paf_terms(const ChannelSet &set, const PilotFrame &frame)
{
    return {reflected_gain(set.f.vector_f, frame.phase_schedule), ls_error_terms(set.g.matrix_g, frame),
            static_cast<int>(set.f.vector_f.size())};
}

inline PafCoefficients mse_coefficients(double total_power_w, double sigma2_bs_w, double sigma2_irs_w, const PafTerms &t)
{
    const double p = total_power_w;
    PafCoefficients c;
    c.a1 = sigma2_bs_w * p * t.reflected * t.ls.pinv_norm2 - sigma2_irs_w * p * t.ls.irs_noise_norm2;
    c.a2 = sigma2_irs_w * p * t.ls.irs_noise_norm2 + sigma2_bs_w * sigma2_irs_w * t.ls.pinv_norm2;
    c.b = -static_cast<double>(t.n) * p * p;
    return c;
}

inline PafCoefficients mse_coefficients(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame)
{
    return mse_coefficients(cfg.total_power_w, cfg.sigma2_bs_w, cfg.sigma2_irs_w, paf_terms(set, frame));
}

inline double mse_beta(const PafCoefficients &c, double beta)
{
    require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument, "beta must lie in (0, 1)");
    return (c.a1 * beta + c.a2) / (c.b * beta * beta - c.b * beta);
}

// The same MSE evaluated from rho(beta) directly.
inline double mse_beta_direct(double beta, double total_power_w, double sigma2_bs_w, double sigma2_irs_w, const PafTerms &t)
{
    const double rho = amplification_gain(beta, total_power_w, t.reflected, sigma2_irs_w);
    const double amp = rho * std::sqrt(beta * total_power_w);
    return ls_expected_error(t.ls, rho, amp, sigma2_irs_w, sigma2_bs_w) / t.n;
}

inline double analytic_mse_beta(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame, double beta)
{
    return mse_beta(mse_coefficients(cfg, set, frame), beta);
}

// Stationary points solve a1 beta^2 + 2 a2 beta - a2 = 0; the roots are
// taken in the cancellation-free form and the argmin over those in (0, 1)
// is returned, ties going to the smaller beta.
inline PafSolution optimal_beta(const PafCoefficients &c)
{
    require(std::isfinite(c.a1) && std::isfinite(c.a2) && std::isfinite(c.b), ErrorCode::invalid_argument,
            "non-finite MSE coefficients");
    std::vector<double> roots;
    if (c.a1 == 0.0)
    {
        if (c.a2 != 0.0)
            roots.push_back(0.5);
    }
    else
    {
        const double qb = 2.0 * c.a2, qc = -c.a2;
        const double disc = qb * qb - 4.0 * c.a1 * qc;
        if (disc >= 0.0)
        {
            const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
            if (q != 0.0)
            {
                roots.push_back(q / c.a1);
                roots.push_back(qc / q);
            }
            else
                roots.push_back(0.0);
        }
    }
    PafSolution s;
    for (double r : roots)
        if (r > 0.0 && r < 1.0)
            s.candidates.push_back(r);
    require(!s.candidates.empty(), ErrorCode::no_candidate, "no stationary point of MSE(beta) inside (0, 1)");
    std::sort(s.candidates.begin(), s.candidates.end());
    s.beta_opt = s.candidates.front();
    s.mse_at_opt = mse_beta(c, s.beta_opt);
    for (double r : s.candidates)
    {
        const double e = mse_beta(c, r);
        if (e < s.mse_at_opt)
        {
            s.beta_opt = r;
            s.mse_at_opt = e;
        }
    }
    return s;
}

} // namespace fieldlab

#endif
