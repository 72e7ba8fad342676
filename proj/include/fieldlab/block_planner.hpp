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

#ifndef FIELDLAB_BLOCK_PLANNER_HPP
#define FIELDLAB_BLOCK_PLANNER_HPP

#include "estimators.hpp"
#include "polynomial.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

namespace fieldlab
{

// Linear phase slopes of sub-block k: the in-block path difference is
// a_y s_y + a_z s_z, with a_y = -d_ya sin(delta_k) cos(eps_k) and
// a_z = -d_za sin(eps_k) from the user direction seen from the block centre.
struct BlockSlopes
{
    double a_y = 0.0;
    double a_z = 0.0;
    double r_k = 0.0;
};

inline std::vector<BlockSlopes> block_slopes(const UserPlacement &p, const SystemConfig &cfg, const BlockPlan &plan)
{
    check_plan(cfg, plan);
    const Vec3 u = user_position(p);
    std::vector<BlockSlopes> out(plan.k_total());
    for (int k = 0; k < plan.k_total(); ++k)
    {
        const Vec3 uk = u - block_center(cfg, plan, k);
        const double rk = uk.norm();
        out[k] = {-cfg.d_ya * uk.y / rk, -cfg.d_za * uk.z / rk, rk};
    }
    return out;
}

// sum_k sum_s |exp(-j k0 (r_k + dr)) - exp(-j k0 r_k)|^2 = sum 4 sin^2(k0 dr / 2)
inline double approx_error_direct(const UserPlacement &p, const SystemConfig &cfg, const BlockPlan &plan)
{
    const double k0 = 2.0 * pi / cfg.wavelength_m;
    double acc = 0.0;
    for (const auto &b : block_slopes(p, cfg, plan))
        for (int sy = 0; sy < plan.s_y; ++sy)
            for (int sz = 0; sz < plan.s_z; ++sz)
            {
                const double dr = b.a_y * centered_offset(sy, plan.s_y) + b.a_z * centered_offset(sz, plan.s_z);
                const double h = std::sin(0.5 * k0 * dr);
                acc += 4.0 * h * h;
            }
    return acc;
}

// C1 = (2 pi / lambda)^2 (a_y^2 + a_z^2) / 12 for each block.
inline std::vector<double> c1_per_block(const UserPlacement &p, const SystemConfig &cfg, const BlockPlan &plan)
{
    const double k0 = 2.0 * pi / cfg.wavelength_m;
    std::vector<double> out;
    for (const auto &b : block_slopes(p, cfg, plan))
        out.push_back(k0 * k0 * (b.a_y * b.a_y + b.a_z * b.a_z) / 12.0);
    return out;
}

inline double sum(const std::vector<double> &v)
{
    double acc = 0.0;
    for (double x : v)
        acc += x;
    return acc;
}

// Small-angle closed form. Square blocks: C2 N^2/K^2 - C2 N/K. Otherwise the
// per-axis sums S(S^2-1)/12 are used directly.
inline double approx_error_closed(const UserPlacement &p, const SystemConfig &cfg, const BlockPlan &plan)
{
    const double n = cfg.n(), k = plan.k_total();
    if (plan.s_y == plan.s_z)
        return sum(c1_per_block(p, cfg, plan)) * (n * n / (k * k) - n / k);
    const double k0 = 2.0 * pi / cfg.wavelength_m;
    const double sy = plan.s_y, sz = plan.s_z;
    double acc = 0.0;
    for (const auto &b : block_slopes(p, cfg, plan))
        acc += k0 * k0 * (b.a_y * b.a_y * sz * sy * (sy * sy - 1.0) + b.a_z * b.a_z * sy * sz * (sz * sz - 1.0)) / 12.0;
    return acc;
}

inline BlockPlan ladder_plan(const SystemConfig &cfg, int k)
{
    for (const auto &plan : balanced_ladder(cfg))
        if (plan.k_total() == k)
            return plan;
    throw Error(ErrorCode::invalid_argument, "no feasible block plan with K = " + std::to_string(k));
}

inline double approx_error_closed(const UserPlacement &p, const SystemConfig &cfg, int k)
{
    return approx_error_closed(p, cfg, ladder_plan(cfg, k));
}

// (rho^2 sigma_i^2 ||B_k||^2 + sigma^2 ||A_k^+||^2) / (rho^2 beta P_t)
inline double c3_constant(const SystemConfig &cfg, const CMatrix &g_k, const PilotFrame &frame_k, double rho)
{
    const LsErrorTerms t = ls_error_terms(g_k, frame_k);
    return (rho * rho * cfg.sigma2_irs_w * t.irs_noise_norm2 + cfg.sigma2_bs_w * t.pinv_norm2) /
           (rho * rho * cfg.beta * cfg.total_power_w);
}

// Raw C3 of every block under the sub-frame protocol.
inline std::vector<double> c3_per_block(const SystemConfig &cfg, const BlockPlan &plan, const ChannelSet &set,
                                        const std::vector<PilotFrame> &frames)
{
    require(static_cast<int>(frames.size()) == plan.k_total(), ErrorCode::dimension_mismatch, "one pilot frame per block expected");
    std::vector<double> out;
    for (int k = 0; k < plan.k_total(); ++k)
    {
        const BlockChannels b = extract_block(cfg, plan, k, set);
        const double rho = block_rho(cfg, plan, set.f.vector_f, b.f_k, frames[k].phase_schedule);
        out.push_back(c3_constant(cfg, b.g_k, frames[k], rho));
    }
    return out;
}

inline double estimation_error_closed(const SystemConfig &cfg, const BlockPlan &plan, double c3)
{
    const double k = plan.k_total();
    return c3 * k * k * k / cfg.n();
}

struct ErrorBudget
{
    BlockPlan plan{};
    int k = 1;
    double eps_approx_direct = 0.0;
    double eps_approx_closed = 0.0;
    double eps_est = 0.0;
    double eps_total = 0.0;
    std::vector<double> c1_per_block;
    double c2 = 0.0;
    double c3 = 0.0;                  // block mean, normalized by |eta_G eta_f|^2
    std::vector<double> c3_per_block; // raw
};

// Error budget of one plan. The estimation part is normalized by the
// channel power |eta_G|^2 |eta_f|^2 so that it is on the same unit-amplitude
// scale as the approximation error.
inline ErrorBudget compute_budget(const SystemConfig &cfg, const ChannelSet &set, const BlockPlan &plan, std::uint64_t pilot_seed)
{
    const UserPlacement &p = set.f.placement;
    ErrorBudget b;
    b.plan = plan;
    b.k = plan.k_total();
    b.eps_approx_direct = approx_error_direct(p, cfg, plan);
    b.eps_approx_closed = approx_error_closed(p, cfg, plan);
    b.c1_per_block = c1_per_block(p, cfg, plan);
    b.c2 = sum(b.c1_per_block);
    b.c3_per_block = c3_per_block(cfg, plan, set, design_block_pilots(cfg, plan, pilot_seed));
    const double power = std::norm(set.g.path_gain) * std::norm(p.path_gain);
    require(power > 0.0, ErrorCode::invalid_argument, "channel path gains must be nonzero");
    b.c3 = sum(b.c3_per_block) / plan.k_total() / power;
    b.eps_est = estimation_error_closed(cfg, plan, b.c3);
    b.eps_total = b.eps_approx_closed + b.eps_est;
    return b;
}

inline std::vector<ErrorBudget> ladder_budgets(const SystemConfig &cfg, const ChannelSet &set, std::uint64_t pilot_seed)
{
    std::vector<ErrorBudget> out;
    for (const auto &plan : balanced_ladder(cfg))
        out.push_back(compute_budget(cfg, set, plan, pilot_seed));
    return out;
}

// ---------- Quintic ----------

struct QuinticSolution
{
    std::array<Complex, 5> roots{};
    std::vector<double> real_roots;
    double newton_root = 0.0;
    int newton_iterations = 0;
    int k_opt_feasible = 0;
};

inline std::vector<double> quintic_coefficients(double c2, double c3, double n)
{
    return {3.0 * c3, 0.0, 0.0, 0.0, c2 * n * n, -2.0 * c2 * n * n * n};
}

// 3 C3 K^5 + C2 N^2 K - 2 C2 N^3 = 0: Newton for the positive root, then
// Ferrari on the deflated quartic.
inline QuinticSolution solve_quintic(double c2, double c3, double n)
{
    require(c2 > 0.0 && c3 > 0.0 && n >= 1.0, ErrorCode::invalid_argument, "quintic needs c2 > 0, c3 > 0, n >= 1");
    const auto coef = quintic_coefficients(c2, c3, n);
    const double scale = c2 * n * n * n;
    QuinticSolution s;
    double k = std::pow(2.0 * c2 * n * n * n / (3.0 * c3), 0.2);
    bool converged = false;
    for (int it = 1; it <= 200; ++it)
    {
        // derivative 15 C3 K^4 + C2 N^2 > 0
        const double f = horner(coef, k);
        k -= f / horner_derivative(coef, k);
        s.newton_iterations = it;
        if (std::abs(horner(coef, k)) < 1e-12 * scale)
        {
            converged = true;
            break;
        }
    }
    require(converged, ErrorCode::convergence, "Newton iteration on the K polynomial did not converge");
    s.newton_root = k;

    const auto quartic = deflate(coef, k);
    const double lead = quartic[0];
    const auto q = quartic_roots(quartic[1] / lead, quartic[2] / lead, quartic[3] / lead, quartic[4] / lead);
    s.roots[0] = k;
    for (int i = 0; i < 4; ++i)
        s.roots[i + 1] = polish_root(coef, q[i]);
    for (const auto &r : s.roots)
        if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r)))
            s.real_roots.push_back(r.real());
    std::sort(s.real_roots.begin(), s.real_roots.end());
    return s;
}

// ---------- Optimal K ----------

struct KOptResult
{
    BlockPlan plan{};
    int k_opt = 1;
    std::optional<QuinticSolution> quintic;
    int fixed_point_iterations = 0;
    int refinement_steps = 0; // ladder moves after the polynomial candidates
    int exhaustive_k = 1;
    bool agrees_with_exhaustive = true;
};

namespace detail
{

inline std::size_t argmin_total(const std::vector<ErrorBudget> &ladder)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i].eps_total < ladder[best].eps_total)
            best = i;
    return best;
}

// Ladder entries bracketing a continuous K.
inline std::vector<std::size_t> bracket(const std::vector<ErrorBudget> &ladder, double k)
{
    std::size_t hi = 0;
    while (hi < ladder.size() && ladder[hi].k < k)
        ++hi;
    std::vector<std::size_t> out;
    if (hi < ladder.size())
        out.push_back(hi);
    if (hi > 0)
        out.push_back(hi - 1);
    return out;
}

} // namespace detail

// Polynomial path over a ladder of budgets (sorted by K). The constants are
// re-evaluated at the projected plan until it stops moving, since C2 and C3
// themselves depend on K; the result is then checked against the neighbours
// and against the exhaustive argmin.
inline KOptResult optimal_k(const std::vector<ErrorBudget> &ladder, int n)
{
    require(!ladder.empty(), ErrorCode::invalid_argument, "feasible ladder is empty");
    KOptResult r;
    const std::size_t exhaustive = detail::argmin_total(ladder);
    r.exhaustive_k = ladder[exhaustive].k;

    std::size_t cur = ladder.size() / 2;
    std::set<std::size_t> visited;
    while (ladder.size() > 1 && visited.insert(cur).second)
    {
        const ErrorBudget &b = ladder[cur];
        if (!(b.c2 > 0.0 && b.c3 > 0.0))
            break;
        ++r.fixed_point_iterations;
        QuinticSolution qs = solve_quintic(b.c2, b.c3, n);
        std::size_t best = cur;
        for (const auto &root : qs.roots)
        {
            const double x = std::clamp(root.real(), 1.0, static_cast<double>(n));
            for (std::size_t i : detail::bracket(ladder, x))
                if (ladder[i].eps_total < ladder[best].eps_total)
                    best = i;
        }
        r.quintic = qs;
        if (best == cur)
            break;
        cur = best;
    }

    while (true)
    {
        std::size_t next = cur;
        if (cur > 0 && ladder[cur - 1].eps_total < ladder[next].eps_total)
            next = cur - 1;
        if (cur + 1 < ladder.size() && ladder[cur + 1].eps_total < ladder[next].eps_total)
            next = cur + 1;
        if (next == cur)
            break;
        cur = next;
        ++r.refinement_steps;
    }
    r.plan = ladder[cur].plan;
    r.k_opt = ladder[cur].k;
    if (r.quintic)
        r.quintic->k_opt_feasible = r.k_opt;
    r.agrees_with_exhaustive = r.k_opt == r.exhaustive_k;
    return r;
}

inline KOptResult optimal_k(const SystemConfig &cfg, const ChannelSet &set, std::uint64_t pilot_seed)
{
    return optimal_k(ladder_budgets(cfg, set, pilot_seed), cfg.n());
}

} // namespace fieldlab

#endif
