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

#ifndef FIELDLAB_AIRLINK_HPP
#define FIELDLAB_AIRLINK_HPP

#include "channels.hpp"
#include "random.hpp"

#include <optional>

namespace fieldlab
{

// IRS phase schedule V (dim x Q, one column per slot) and pilot symbols x.
struct PilotFrame
{
    CMatrix phase_schedule;
    CVector pilot_symbols;
    std::optional<int> block_index{};

    int dim() const { return static_cast<int>(phase_schedule.rows()); }
    int slots() const { return static_cast<int>(phase_schedule.cols()); }

    // V * diag(x)
    CMatrix excitation() const { return phase_schedule * pilot_symbols.asDiagonal(); }
};

struct RxFrame
{
    CMatrix observations;
    double rho_used = 0.0;
    double amplitude = 0.0; // rho * sqrt(beta * P), with P the power of this (sub-)frame
    std::uint64_t noise_realization_seed = 0;
};

// Observation split into its three additive terms.
struct RxComponents
{
    CMatrix signal;
    CMatrix irs_noise;
    CMatrix bs_noise;
    double rho_used = 0.0;
    double amplitude = 0.0;

    RxFrame combine(double irs_scale = 1.0, double bs_scale = 1.0, std::uint64_t seed = 0) const
    {
        return {signal + irs_scale * irs_noise + bs_scale * bs_noise, rho_used, amplitude, seed};
    }
};

// Mean over slots of ||diag(f) theta_q||^2.
inline double reflected_gain(const CVector &f, const CMatrix &phase_schedule)
{
    require(f.size() == phase_schedule.rows(), ErrorCode::dimension_mismatch, "f and V dimensions disagree");
    require(phase_schedule.cols() >= 1, ErrorCode::invalid_argument, "phase schedule has no slots");
    return (f.cwiseAbs2().asDiagonal() * phase_schedule.cwiseAbs2()).sum() / static_cast<double>(phase_schedule.cols());
}

inline double amplification_gain(double beta, double total_power_w, double reflected, double sigma2_irs_w)
{
    require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument, "beta must lie in (0, 1)");
    require(total_power_w > 0.0, ErrorCode::invalid_argument, "power must be positive");
    const double den = beta * total_power_w * reflected + sigma2_irs_w;
    require(den > 0.0, ErrorCode::invalid_argument, "amplifier input power is zero");
    return std::sqrt((1.0 - beta) * total_power_w / den);
}

inline double amplification_gain(double beta, double total_power_w, const CVector &f, const CMatrix &phase_schedule,
                                 double sigma2_irs_w)
{
    return amplification_gain(beta, total_power_w, reflected_gain(f, phase_schedule), sigma2_irs_w);
}

// Pilots whose excitation V diag(x) has orthogonal rows, Gram = q * I:
// the first `dim` rows of the q-point DFT with random row phases, and random
// QPSK symbols. With q == dim the columns are orthogonal as well.
inline PilotFrame design_pilots(int dim, int q, std::uint64_t seed)
{
    require(dim >= 1, ErrorCode::invalid_argument, "pilot dimension must be >= 1");
    require(q >= dim, ErrorCode::invalid_argument, "pilot length must be at least the number of elements");
    Rng rng(seed);
    CMatrix v(dim, q);
    for (int n = 0; n < dim; ++n)
    {
        const Complex row_phase = rng.unit_phase();
        for (int t = 0; t < q; ++t)
        {
            const auto nt = static_cast<double>((static_cast<long long>(n) * t) % q);
            v(n, t) = row_phase * std::polar(1.0, -2.0 * pi * nt / q);
        }
    }
    CVector x(q);
    for (int t = 0; t < q; ++t)
        x(t) = std::polar(1.0, 0.5 * pi * static_cast<double>(rng.below(4)) + 0.25 * pi);
    return {v, x, std::nullopt};
}

// Independent uniform phases: unit-modulus but generally non-orthogonal.
inline PilotFrame random_pilots(int dim, int q, std::uint64_t seed)
{
    require(dim >= 1 && q >= 1, ErrorCode::invalid_argument, "pilot dimensions must be >= 1");
    Rng rng(seed);
    CMatrix v(dim, q);
    for (int t = 0; t < q; ++t)
        for (int n = 0; n < dim; ++n)
            v(n, t) = rng.unit_phase();
    CVector x(q);
    for (int t = 0; t < q; ++t)
        x(t) = rng.unit_phase();
    return {v, x, std::nullopt};
}

namespace detail
{

inline RxComponents synthesize(const CMatrix &h, const CMatrix &g, const PilotFrame &frame, double rho, double amplitude,
                               double sigma2_irs, double sigma2_bs, std::uint64_t seed)
{
    require(h.rows() == g.rows() && h.cols() == g.cols(), ErrorCode::dimension_mismatch, "H and G shapes disagree");
    require(h.cols() == frame.dim(), ErrorCode::dimension_mismatch, "channel and phase schedule dimensions disagree");
    require(frame.pilot_symbols.size() == frame.slots(), ErrorCode::dimension_mismatch, "pilot length disagrees with schedule");
    Rng rng(seed);
    RxComponents out;
    out.rho_used = rho;
    out.amplitude = amplitude;
    out.signal = amplitude * (h * frame.excitation());
    // slot q: rho * G diag(theta_q) n_q, n_q ~ CN(0, sigma_i^2 I)
    const CMatrix z = rng.complex_normal(frame.dim(), frame.slots(), sigma2_irs);
    out.irs_noise = rho * (g * frame.phase_schedule.cwiseProduct(z));
    out.bs_noise = rng.complex_normal(h.rows(), frame.slots(), sigma2_bs);
    return out;
}

} // namespace detail

inline RxComponents synthesize_rx_components(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame,
                                             std::uint64_t seed)
{
    const double rho = amplification_gain(cfg.beta, cfg.total_power_w, set.f.vector_f, frame.phase_schedule, cfg.sigma2_irs_w);
    return detail::synthesize(set.h.matrix_h, set.g.matrix_g, frame, rho, rho * std::sqrt(cfg.beta * cfg.total_power_w),
                              cfg.sigma2_irs_w, cfg.sigma2_bs_w, seed);
}

// Y = rho sqrt(beta P) H V X + rho sum_q G diag(theta_q) n_q e_q^T + N
inline RxFrame synthesize_rx_frame(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame, std::uint64_t seed)
{
    return synthesize_rx_components(cfg, set, frame, seed).combine(1.0, 1.0, seed);
}

// Channels restricted to sub-block k.
struct BlockChannels
{
    CMatrix h_k;
    CMatrix g_k;
    CVector f_k;
};

inline BlockChannels extract_block(const SystemConfig &cfg, const BlockPlan &plan, int k, const ChannelSet &set)
{
    const auto idx = block_element_indices(cfg, plan, k);
    return {select_columns(set.h.matrix_h, idx), select_columns(set.g.matrix_g, idx), select_entries(set.f.vector_f, idx)};
}

// Amplification used in sub-frame k: recomputed from the block channel with
// power P/K, or the full-array value when rho_mode is shared.
inline double block_rho(const SystemConfig &cfg, const BlockPlan &plan, const CVector &f_full, const CVector &f_k,
                        const CMatrix &phase_schedule_k)
{
    if (cfg.rho_mode == RhoMode::shared)
        return amplification_gain(cfg.beta, cfg.total_power_w, f_full.squaredNorm(), cfg.sigma2_irs_w);
    return amplification_gain(cfg.beta, cfg.total_power_w / plan.k_total(), f_k, phase_schedule_k, cfg.sigma2_irs_w);
}

inline RxComponents synthesize_rx_subcomponents(const SystemConfig &cfg, const BlockPlan &plan, int k, const ChannelSet &set,
                                                const PilotFrame &frame_k, std::uint64_t seed)
{
    check_plan(cfg, plan);
    require(k >= 0 && k < plan.k_total(), ErrorCode::out_of_range, "block index out of range");
    require(frame_k.dim() == plan.s_total(), ErrorCode::dimension_mismatch, "sub-frame schedule must have S rows");
    const BlockChannels b = extract_block(cfg, plan, k, set);
    const double rho = block_rho(cfg, plan, set.f.vector_f, b.f_k, frame_k.phase_schedule);
    const double amplitude = rho * std::sqrt(cfg.beta * cfg.total_power_w / plan.k_total());
    return detail::synthesize(b.h_k, b.g_k, frame_k, rho, amplitude, cfg.sigma2_irs_w, cfg.sigma2_bs_w, seed);
}

inline RxFrame synthesize_rx_subframe(const SystemConfig &cfg, const BlockPlan &plan, int k, const ChannelSet &set,
                                      const PilotFrame &frame_k, std::uint64_t seed)
{
    return synthesize_rx_subcomponents(cfg, plan, k, set, frame_k, seed).combine(1.0, 1.0, seed);
}

// Sub-frame pilots: one orthogonal design per block, each from its own stream.
inline std::vector<PilotFrame> design_block_pilots(const SystemConfig &cfg, const BlockPlan &plan, std::uint64_t seed)
{
    check_plan(cfg, plan);
    std::vector<PilotFrame> frames;
    frames.reserve(plan.k_total());
    for (int k = 0; k < plan.k_total(); ++k)
    {
        frames.push_back(design_pilots(plan.s_total(), block_pilot_length(cfg, plan), derive_seed(seed, static_cast<std::uint64_t>(k))));
        frames.back().block_index = k;
    }
    return frames;
}

} // namespace fieldlab

#endif
