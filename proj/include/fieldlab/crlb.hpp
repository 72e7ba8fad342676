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

#ifndef FIELDLAB_CRLB_HPP
#define FIELDLAB_CRLB_HPP

#include "airlink.hpp"

#include <Eigen/Eigenvalues>

namespace fieldlab
{

// Bounds on E||h_hat - h||^2 for the full-frame estimate of vec(H).
struct CrlbResult
{
    double gamma_real = 0.0;
    double gamma_imag = 0.0;
    double gamma_total = 0.0;
    double sigma_n2 = 0.0; // per-entry complex variance of the aggregate noise
    double closed_form_value = 0.0;
    double general_form_value = 0.0;
    double closed_to_general = 0.0;
};

// Per-entry variance of rho G V N_i + N, averaged over antennas and slots.
inline double effective_noise_var(const SystemConfig &cfg, const CMatrix &g, const PilotFrame &frame, double rho)
{
    require(g.cols() == frame.dim(), ErrorCode::dimension_mismatch, "G and pilot frame dimensions disagree");
    const RVector col_power = g.colwise().squaredNorm().transpose();
    const double irs = (frame.phase_schedule.cwiseAbs2().transpose() * col_power).sum();
    return rho * rho * cfg.sigma2_irs_w * irs / (static_cast<double>(g.rows()) * frame.slots()) + cfg.sigma2_bs_w;
}

// sigma_n^2 tr((A^H A)^-1) / (rho^2 beta P), with the trace taken from the
// eigenvalues tau_i of the dim x dim Gram (VX)(VX)^H.
inline double crlb_general(const PilotFrame &frame, int m, double sigma_n2, double rho, double beta, double total_power_w)
{
    const CMatrix e = frame.excitation();
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(e * e.adjoint(), Eigen::EigenvaluesOnly);
    const RVector tau = eig.eigenvalues();
    require(tau.minCoeff() > 1e-12 * tau.maxCoeff(), ErrorCode::rank_deficient, "pilot Gram matrix is singular");
    return sigma_n2 * m * tau.cwiseInverse().sum() / (rho * rho * beta * total_power_w);
}

// 2 sigma_n^2 M / (N^2 Q1^4 rho^2 beta P) with sigma_n^2 per real dimension.
inline double crlb_closed(const SystemConfig &cfg, double rho, double sigma_n2, int q1)
{
    const double n = cfg.n(), q = q1;
    return sigma_n2 * cfg.m() / (n * n * q * q * q * q * rho * rho * cfg.beta * cfg.total_power_w);
}

inline CrlbResult compute_crlb(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame)
{
    const double rho = amplification_gain(cfg.beta, cfg.total_power_w, set.f.vector_f, frame.phase_schedule, cfg.sigma2_irs_w);
    CrlbResult r;
    r.sigma_n2 = effective_noise_var(cfg, set.g.matrix_g, frame, rho);
    r.general_form_value = crlb_general(frame, cfg.m(), r.sigma_n2, rho, cfg.beta, cfg.total_power_w);
    r.closed_form_value = crlb_closed(cfg, rho, r.sigma_n2, frame.slots());
    r.gamma_real = 0.5 * r.general_form_value;
    r.gamma_imag = r.gamma_real;
    r.gamma_total = r.gamma_real + r.gamma_imag;
    r.closed_to_general = r.closed_form_value / r.general_form_value;
    return r;
}

} // namespace fieldlab

#endif
