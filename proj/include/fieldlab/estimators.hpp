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

#ifndef FIELDLAB_ESTIMATORS_HPP
#define FIELDLAB_ESTIMATORS_HPP

#include "airlink.hpp"

#include <Eigen/QR>

#include <limits>
#include <vector>

namespace fieldlab
{

enum class EstimateMethod
{
    ls,
    lmmse,
    imported,
};

struct EstimateResult
{
    CMatrix h_hat;
    double mse_vs_truth = std::numeric_limits<double>::quiet_NaN();
    EstimateMethod method = EstimateMethod::ls;
};

// Right pseudo-inverse W (Q x dim) of the excitation V diag(x), so that
// (V diag(x)) W = I. Least-squares solve of (VX)^T W^T = I_Q by column-pivoted
// QR; the MQ x MN Kronecker operator of the vectorized model is never formed.
inline CMatrix right_pinv(const CMatrix &excitation)
{
    const Eigen::Index dim = excitation.rows(), q = excitation.cols();
    require(q >= dim, ErrorCode::rank_deficient, "pilot excitation has fewer slots than unknowns");
    Eigen::ColPivHouseholderQR<CMatrix> qr(excitation.transpose());
    require(qr.rank() == dim, ErrorCode::rank_deficient, "pilot excitation is rank deficient");
    return qr.solve(CMatrix::Identity(q, q)).transpose();
}

// Reusable LS operator for one pilot frame.
class LsSolver
{
public:
    explicit LsSolver(const PilotFrame &frame) : w_(right_pinv(frame.excitation())), dim_(frame.dim()) {}

    const CMatrix &pinv() const { return w_; }

    CMatrix solve(const RxFrame &rx) const
    {
        require(rx.observations.cols() == w_.rows(), ErrorCode::dimension_mismatch, "observation length disagrees with pilot frame");
        require(rx.amplitude > 0.0, ErrorCode::invalid_argument, "frame amplitude must be positive");
        return rx.observations * w_ / rx.amplitude;
    }

    // ||W||_F^2 and sum_q ||G diag(theta_q)||_F^2 ||w_q||^2 for the MSE expressions.
    double pinv_norm2() const { return w_.squaredNorm(); }

    double irs_noise_norm2(const CMatrix &g, const PilotFrame &frame) const
    {
        require(g.cols() == dim_ && frame.dim() == dim_, ErrorCode::dimension_mismatch, "G and pilot frame dimensions disagree");
        const RVector col_power = g.colwise().squaredNorm().transpose();                           // dim
        const RVector slot_gain = frame.phase_schedule.cwiseAbs2().transpose() * col_power;        // Q
        return slot_gain.dot(w_.rowwise().squaredNorm());
    }

private:
    CMatrix w_;
    int dim_;
};

inline double empirical_mse(const CMatrix &h_hat, const CMatrix &h_true, double normalizer)
{
    require(h_hat.rows() == h_true.rows() && h_hat.cols() == h_true.cols(), ErrorCode::shape_mismatch, "estimate and truth shapes disagree");
    require(normalizer > 0.0, ErrorCode::invalid_argument, "normalizer must be positive");
    return (h_hat - h_true).squaredNorm() / normalizer;
}

inline EstimateResult ls_full(const PilotFrame &frame, const RxFrame &rx)
{
    return {LsSolver(frame).solve(rx), std::numeric_limits<double>::quiet_NaN(), EstimateMethod::ls};
}

inline EstimateResult ls_full(const PilotFrame &frame, const RxFrame &rx, const CMatrix &h_true)
{
    EstimateResult r = ls_full(frame, rx);
    r.mse_vs_truth = empirical_mse(r.h_hat, h_true, static_cast<double>(h_true.cols()));
    return r;
}

// Per-block LS; rx.amplitude already carries the sqrt(1/K) power share.
inline EstimateResult ls_block(const PilotFrame &frame_k, const RxFrame &rx_k, const SystemConfig &cfg, const BlockPlan &plan)
{
    check_plan(cfg, plan);
    require(frame_k.dim() == plan.s_total(), ErrorCode::dimension_mismatch, "sub-frame schedule must have S rows");
    return {LsSolver(frame_k).solve(rx_k), std::numeric_limits<double>::quiet_NaN(), EstimateMethod::ls};
}

// Expected ||H_hat - H||_F^2 of LS:
// (rho^2 sigma_i^2 ||B||^2 + sigma^2 M ||W||^2) / amplitude^2
struct LsErrorTerms
{
    double pinv_norm2 = 0.0;     // ||A^+||_F^2 = M ||W||_F^2
    double irs_noise_norm2 = 0.0; // ||B||_F^2
};

inline LsErrorTerms ls_error_terms(const CMatrix &g, const PilotFrame &frame)
{
    const LsSolver solver(frame);
    return {static_cast<double>(g.rows()) * solver.pinv_norm2(), solver.irs_noise_norm2(g, frame)};
}

inline double ls_expected_error(const LsErrorTerms &t, double rho, double amplitude, double sigma2_irs, double sigma2_bs)
{
    return (rho * rho * sigma2_irs * t.irs_noise_norm2 + sigma2_bs * t.pinv_norm2) / (amplitude * amplitude);
}

// Full-frame MSE with the 1/N normalizer.
inline double analytic_mse(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame)
{
    const double rho = amplification_gain(cfg.beta, cfg.total_power_w, set.f.vector_f, frame.phase_schedule, cfg.sigma2_irs_w);
    const double amp = rho * std::sqrt(cfg.beta * cfg.total_power_w);
    return ls_expected_error(ls_error_terms(set.g.matrix_g, frame), rho, amp, cfg.sigma2_irs_w, cfg.sigma2_bs_w) / cfg.n();
}

// ---------- LMMSE ----------

// First and second moments of vec(H) (column-major, length M*dim).
struct ChannelStats
{
    CVector mean;
    CMatrix covariance;
};

inline CVector vec(const CMatrix &m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

inline CMatrix unvec(const CVector &v, Eigen::Index rows, Eigen::Index cols)
{
    require(v.size() == rows * cols, ErrorCode::dimension_mismatch, "vector length disagrees with shape");
    return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

inline ChannelStats estimate_channel_stats(const std::vector<CMatrix> &samples)
{
    require(samples.size() >= 2, ErrorCode::invalid_argument, "need at least two channel samples");
    const Eigen::Index len = samples.front().size();
    ChannelStats s{CVector::Zero(len), CMatrix::Zero(len, len)};
    for (const auto &h : samples)
    {
        require(h.size() == len, ErrorCode::shape_mismatch, "channel samples differ in shape");
        s.mean += vec(h);
    }
    s.mean /= static_cast<double>(samples.size());
    for (const auto &h : samples)
    {
        const CVector d = vec(h) - s.mean;
        s.covariance.noalias() += d * d.adjoint();
    }
    s.covariance /= static_cast<double>(samples.size() - 1);
    return s;
}

// Covariance of vec(H_ls - H) for one frame: sum_q (w_q^T conj(w_q)) (x) C_q
// with C_q = rho^2 sigma_i^2 G diag(|theta_q|^2) G^H + sigma^2 I.
inline CMatrix ls_error_covariance(const CMatrix &g, const PilotFrame &frame, const CMatrix &w, double rho, double amplitude,
                                   double sigma2_irs, double sigma2_bs)
{
    const Eigen::Index m = g.rows(), dim = frame.dim();
    CMatrix cov = CMatrix::Zero(m * dim, m * dim);
    for (int q = 0; q < frame.slots(); ++q)
    {
        const CMatrix gq = g * frame.phase_schedule.col(q).asDiagonal();
        const CMatrix cq = rho * rho * sigma2_irs * (gq * gq.adjoint()) + sigma2_bs * CMatrix::Identity(m, m);
        const CVector wq = w.row(q).transpose();
        const CMatrix outer = wq * wq.adjoint(); // (a, b) -> w_qa conj(w_qb)
        for (Eigen::Index a = 0; a < dim; ++a)
            for (Eigen::Index b = 0; b < dim; ++b)
                cov.block(a * m, b * m, m, m) += outer(a, b) * cq;
    }
    return cov / (amplitude * amplitude);
}

// Linear MMSE refinement of the LS statistic, which is sufficient for H:
// h = mu + R (R + C_e)^-1 (h_ls - mu), R regularized by 1e-6 tr(R)/size.
inline EstimateResult lmmse(const PilotFrame &frame, const RxFrame &rx, const CMatrix &g, const ChannelStats &stats,
                            double sigma2_irs, double sigma2_bs)
{
    const LsSolver solver(frame);
    const CMatrix h_ls = solver.solve(rx);
    const Eigen::Index len = h_ls.size();
    require(stats.mean.size() == len && stats.covariance.rows() == len && stats.covariance.cols() == len,
            ErrorCode::shape_mismatch, "channel statistics do not match the estimate shape");
    const double delta = 1e-6 * std::max(stats.covariance.trace().real(), std::numeric_limits<double>::min()) / static_cast<double>(len);
    const CMatrix r = stats.covariance + delta * CMatrix::Identity(len, len);
    const CMatrix ce = ls_error_covariance(g, frame, solver.pinv(), rx.rho_used, rx.amplitude, sigma2_irs, sigma2_bs);
    const CMatrix total = r + ce;
    // (R + C_e) is Hermitian positive definite
    const CVector gain_in = total.ldlt().solve(vec(h_ls) - stats.mean);
    const CVector h = stats.mean + r * gain_in;
    return {unvec(h, h_ls.rows(), h_ls.cols()), std::numeric_limits<double>::quiet_NaN(), EstimateMethod::lmmse};
}

} // namespace fieldlab

#endif
