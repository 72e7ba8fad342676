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

#ifndef FIELDLAB_CHANNELS_HPP
#define FIELDLAB_CHANNELS_HPP

#include "random.hpp"
#include "sysmodel.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace fieldlab
{

// ---------- Block plans ----------

struct BlockPlan
{
    int k_y = 1;
    int k_z = 1;
    int s_y = 1;
    int s_z = 1;

    int k_total() const { return k_y * k_z; }
    int s_total() const { return s_y * s_z; }

    friend bool operator==(const BlockPlan &, const BlockPlan &) = default;
};

inline BlockPlan make_plan(const SystemConfig &cfg, int k_y, int k_z)
{
    require(k_y >= 1 && k_z >= 1, ErrorCode::invalid_argument, "block counts must be >= 1");
    require(cfg.n_y % k_y == 0 && cfg.n_z % k_z == 0, ErrorCode::invalid_argument,
            "block counts must divide the IRS dimensions");
    return {k_y, k_z, cfg.n_y / k_y, cfg.n_z / k_z};
}

inline void check_plan(const SystemConfig &cfg, const BlockPlan &plan)
{
    require(plan.k_y >= 1 && plan.k_z >= 1 && plan.s_y >= 1 && plan.s_z >= 1 &&
                plan.k_y * plan.s_y == cfg.n_y && plan.k_z * plan.s_z == cfg.n_z,
            ErrorCode::invalid_argument, "block plan does not tile the IRS");
}

inline std::vector<int> divisors(int n)
{
    std::vector<int> out;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0)
            out.push_back(d);
    return out;
}

// Every regular partition of the IRS, ordered by (K, k_y).
inline std::vector<BlockPlan> all_plans(const SystemConfig &cfg)
{
    std::vector<BlockPlan> out;
    for (int ky : divisors(cfg.n_y))
        for (int kz : divisors(cfg.n_z))
            out.push_back(make_plan(cfg, ky, kz));
    std::sort(out.begin(), out.end(), [](const BlockPlan &a, const BlockPlan &b)
              { return a.k_total() != b.k_total() ? a.k_total() < b.k_total() : a.k_y < b.k_y; });
    return out;
}

// The K ladder searched by the planner: for each y-split, the z-split whose
// blocks are closest to square (S_y ~ S_z). One plan per K, sorted by K.
// For a square IRS this is k_y = k_z.
inline std::vector<BlockPlan> balanced_ladder(const SystemConfig &cfg)
{
    std::vector<BlockPlan> out;
    for (int ky : divisors(cfg.n_y))
    {
        const int sy = cfg.n_y / ky;
        int best = -1;
        for (int kz : divisors(cfg.n_z))
        {
            const int sz = cfg.n_z / kz;
            if (best < 0 || std::abs(sz - sy) < std::abs(cfg.n_z / best - sy))
                best = kz;
        }
        out.push_back(make_plan(cfg, ky, best));
    }
    std::sort(out.begin(), out.end(), [](const BlockPlan &a, const BlockPlan &b)
              { return a.k_total() < b.k_total(); });
    out.erase(std::unique(out.begin(), out.end(), [](const BlockPlan &a, const BlockPlan &b)
                          { return a.k_total() == b.k_total(); }),
              out.end());
    return out;
}

inline BlockPlan plan_from_config(const SystemConfig &cfg)
{
    if (cfg.block_plan)
        return make_plan(cfg, cfg.block_plan->k_y, cfg.block_plan->k_z);
    return make_plan(cfg, 1, 1);
}

// Pilot slots per sub-frame; q2 = 0 selects the square design Q2 = S.
inline int block_pilot_length(const SystemConfig &cfg, const BlockPlan &plan)
{
    return cfg.q2 > 0 ? cfg.q2 : plan.s_total();
}

// Natural (y-major) index of element (iy, iz), both zero-based.
inline int element_index(const SystemConfig &cfg, int iy, int iz) { return iy * cfg.n_z + iz; }

// Block k = ky * K_z + kz (zero-based, y-major over blocks). Returns the
// natural indices of its S elements, y-major within the block.
inline std::vector<int> block_element_indices(const SystemConfig &cfg, const BlockPlan &plan, int k)
{
    check_plan(cfg, plan);
    require(k >= 0 && k < plan.k_total(), ErrorCode::out_of_range, "block index out of range");
    const int ky = k / plan.k_z;
    const int kz = k % plan.k_z;
    std::vector<int> out;
    out.reserve(plan.s_total());
    for (int sy = 0; sy < plan.s_y; ++sy)
        for (int sz = 0; sz < plan.s_z; ++sz)
            out.push_back(element_index(cfg, ky * plan.s_y + sy, kz * plan.s_z + sz));
    return out;
}

// Block centre for centred block offsets (ky, kz).
inline Vec3 block_center(const SystemConfig &cfg, const BlockPlan &plan, double ky, double kz)
{
    check_plan(cfg, plan);
    require(is_centered_offset(ky, plan.k_y) && is_centered_offset(kz, plan.k_z), ErrorCode::out_of_range,
            "block index outside the plan");
    return {0.0, ky * plan.s_y * cfg.d_ya, kz * plan.s_z * cfg.d_za};
}

inline Vec3 block_center(const SystemConfig &cfg, const BlockPlan &plan, int k)
{
    require(k >= 0 && k < plan.k_total(), ErrorCode::out_of_range, "block index out of range");
    return block_center(cfg, plan, centered_offset(k / plan.k_z, plan.k_y), centered_offset(k % plan.k_z, plan.k_z));
}

// ---------- Channel types ----------

enum class NfMode
{
    exact,
    taylor,
    block_ff,
};

inline std::string_view to_string(NfMode mode)
{
    switch (mode)
    {
    case NfMode::exact: return "exact";
    case NfMode::taylor: return "taylor";
    case NfMode::block_ff: return "block_ff";
    }
    return "unknown";
}

struct FarFieldChannel
{
    CMatrix matrix_g;
    Complex path_gain{1.0, 0.0};
    FarFieldAngles angles{};
};

// Entries in natural element order; see block_major() for the sub-block order.
struct NearFieldChannel
{
    CVector vector_f;
    UserPlacement placement{};
    NfMode mode = NfMode::exact;
};

struct CascadedChannel
{
    CMatrix matrix_h;
    NfMode source = NfMode::exact;
};

// ---------- Builders ----------

inline CVector upa_steering(double az, double el, int ny, int nz, double dy, double dz, double wavelength)
{
    require(ny >= 1 && nz >= 1, ErrorCode::invalid_argument, "array dimensions must be >= 1");
    const double k0 = 2.0 * pi / wavelength;
    const double uy = k0 * dy * std::sin(az) * std::cos(el);
    const double uz = k0 * dz * std::sin(el);
    CVector a(ny * nz);
    for (int iy = 0; iy < ny; ++iy)
        for (int iz = 0; iz < nz; ++iz)
            a(iy * nz + iz) = std::polar(1.0, centered_offset(iy, ny) * uy + centered_offset(iz, nz) * uz);
    return a;
}

inline FarFieldChannel ff_channel_g(const SystemConfig &cfg, Complex path_gain, const FarFieldAngles &angles)
{
    const CVector a_bs = upa_steering(angles.bs_azimuth_rad, angles.bs_elevation_rad, cfg.m_y, cfg.m_z,
                                      cfg.d_yb, cfg.d_zb, cfg.wavelength_m);
    const CVector a_irs = upa_steering(angles.irs_azimuth_rad, angles.irs_elevation_rad, cfg.n_y, cfg.n_z,
                                       cfg.d_ya, cfg.d_za, cfg.wavelength_m);
    return {path_gain * a_bs * a_irs.transpose(), path_gain, angles};
}

inline double nf_distance_exact(const Vec3 &user, const Vec3 &element) { return (user - element).norm(); }

// Second-order expansion around the array centre with the bilinear term dropped.
inline double nf_distance_taylor(const UserPlacement &p, double iy, double iz, const SystemConfig &cfg)
{
    require(p.r_m > 0.0, ErrorCode::invalid_argument, "user distance must be positive");
    const double sa = std::sin(p.azimuth_rad), ce = std::cos(p.elevation_rad), se = std::sin(p.elevation_rad);
    const double y = iy * cfg.d_ya, z = iz * cfg.d_za;
    const double r_y = -y * sa * ce + y * y * (1.0 - sa * sa * ce * ce) / (2.0 * p.r_m);
    const double r_z = -z * se + z * z * ce * ce / (2.0 * p.r_m);
    return p.r_m + r_y + r_z;
}

inline NearFieldChannel block_ff_channel(const UserPlacement &p, const SystemConfig &cfg, const BlockPlan &plan)
{
    check_plan(cfg, plan);
    const double k0 = 2.0 * pi / cfg.wavelength_m;
    const Vec3 u = user_position(p);
    CVector f(cfg.n());
    for (int k = 0; k < plan.k_total(); ++k)
    {
        const Vec3 uk = u - block_center(cfg, plan, k);
        const double rk = uk.norm();
        // sin(delta_k) cos(eps_k) and sin(eps_k) of the block-local direction
        const double dir_y = uk.y / rk, dir_z = uk.z / rk;
        const auto idx = block_element_indices(cfg, plan, k);
        for (int sy = 0; sy < plan.s_y; ++sy)
            for (int sz = 0; sz < plan.s_z; ++sz)
            {
                const double dr = -centered_offset(sy, plan.s_y) * cfg.d_ya * dir_y - centered_offset(sz, plan.s_z) * cfg.d_za * dir_z;
                f(idx[sy * plan.s_z + sz]) = p.path_gain * std::polar(1.0, -k0 * (rk - p.r_m + dr));
            }
    }
    return {f, p, NfMode::block_ff};
}

// The global phase exp(-j 2 pi r_p / lambda) is removed in every mode.
inline NearFieldChannel nf_channel(const UserPlacement &p, const SystemConfig &cfg, NfMode mode,
                                   const std::optional<BlockPlan> &plan = std::nullopt)
{
    p.validate();
    if (mode == NfMode::block_ff)
    {
        require(plan.has_value() || cfg.block_plan.has_value(), ErrorCode::invalid_argument,
                "block_ff mode needs a block plan");
        return block_ff_channel(p, cfg, plan ? *plan : plan_from_config(cfg));
    }
    require(mode == NfMode::exact || mode == NfMode::taylor, ErrorCode::invalid_argument, "unknown near-field mode");
    const double k0 = 2.0 * pi / cfg.wavelength_m;
    const Vec3 u = user_position(p);
    CVector f(cfg.n());
    for (int iy = 0; iy < cfg.n_y; ++iy)
        for (int iz = 0; iz < cfg.n_z; ++iz)
        {
            const double oy = centered_offset(iy, cfg.n_y), oz = centered_offset(iz, cfg.n_z);
            const double d = mode == NfMode::exact ? nf_distance_exact(u, element_position(cfg, oy, oz))
                                                   : nf_distance_taylor(p, oy, oz, cfg);
            f(element_index(cfg, iy, iz)) = p.path_gain * std::polar(1.0, -k0 * (d - p.r_m));
        }
    return {f, p, mode};
}

inline CascadedChannel cascaded(const FarFieldChannel &g, const NearFieldChannel &f)
{
    require(g.matrix_g.cols() == f.vector_f.size(), ErrorCode::dimension_mismatch, "G and f dimensions disagree");
    return {g.matrix_g * f.vector_f.asDiagonal(), f.mode};
}

// Reorders a natural-order vector into the sub-block order [f_1; ...; f_K].
inline CVector block_major(const CVector &natural, const SystemConfig &cfg, const BlockPlan &plan)
{
    require(natural.size() == cfg.n(), ErrorCode::dimension_mismatch, "vector length must equal N");
    CVector out(cfg.n());
    int pos = 0;
    for (int k = 0; k < plan.k_total(); ++k)
        for (int idx : block_element_indices(cfg, plan, k))
            out(pos++) = natural(idx);
    return out;
}

inline CMatrix select_columns(const CMatrix &m, const std::vector<int> &cols)
{
    CMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = m.col(cols[c]);
    return out;
}

inline CVector select_entries(const CVector &v, const std::vector<int> &idx)
{
    CVector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = v(idx[i]);
    return out;
}

// ---------- Scenario draws ----------

struct ChannelSet
{
    FarFieldChannel g;
    NearFieldChannel f;
    CascadedChannel h;
};

inline UserPlacement draw_placement(const SystemConfig &cfg, Rng &rng)
{
    UserPlacement p;
    p.r_m = rng.uniform(cfg.user_range.r_min_m, cfg.user_range.r_max_m);
    p.azimuth_rad = rng.uniform(-cfg.user_range.angle_max_rad, cfg.user_range.angle_max_rad);
    p.elevation_rad = rng.uniform(-cfg.user_range.angle_max_rad, cfg.user_range.angle_max_rad);
    p.path_gain = path_gain_magnitude(cfg, p.r_m) * rng.unit_phase();
    return p;
}

inline Complex draw_g_gain(const SystemConfig &cfg, Rng &rng)
{
    return path_gain_magnitude(cfg, cfg.irs_bs_distance_m) * rng.unit_phase();
}

inline ChannelSet make_channels(const SystemConfig &cfg, Complex g_gain, const UserPlacement &p, NfMode mode = NfMode::exact,
                                const std::optional<BlockPlan> &plan = std::nullopt)
{
    ChannelSet set{ff_channel_g(cfg, g_gain, cfg.g_angles), nf_channel(p, cfg, mode, plan), {}};
    set.h = cascaded(set.g, set.f);
    return set;
}

// Nominal geometry with real positive path gains.
inline ChannelSet nominal_channels(const SystemConfig &cfg, NfMode mode = NfMode::exact)
{
    UserPlacement p = cfg.nominal_user;
    p.path_gain = path_gain_magnitude(cfg, p.r_m);
    return make_channels(cfg, path_gain_magnitude(cfg, cfg.irs_bs_distance_m), p, mode);
}

inline ChannelSet draw_channels(const SystemConfig &cfg, Rng &rng, NfMode mode = NfMode::exact)
{
    const Complex g_gain = draw_g_gain(cfg, rng);
    return make_channels(cfg, g_gain, draw_placement(cfg, rng), mode);
}

} // namespace fieldlab

#endif
