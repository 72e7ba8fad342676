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

#ifndef FIELDLAB_EXPERIMENTS_HPP
#define FIELDLAB_EXPERIMENTS_HPP

#include "block_planner.hpp"
#include "crlb.hpp"
#include "dataset.hpp"
#include "power_alloc.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace fieldlab
{

inline constexpr const char *csv_schema = "fieldlab-csv/1";
inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct Table
{
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row)
    {
        require(row.size() == columns.size(), ErrorCode::dimension_mismatch, "row width disagrees with the table header");
        rows.push_back(std::move(row));
    }

    std::size_t column(const std::string &name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name)
                return i;
        throw Error(ErrorCode::invalid_argument, "no column '" + name + "'");
    }
};

inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string to_csv(const Table &t, const std::string &digest, std::uint64_t seed)
{
    std::string out = std::string("# ") + csv_schema + " command=" + t.command + " config_digest=" + digest +
                      " seed=" + std::to_string(seed) + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto &row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

inline void write_csv(const std::string &path, const Table &t, const std::string &digest, std::uint64_t seed)
{
    detail::write_text(path, to_csv(t, digest, seed));
}

// Running mean and standard error.
struct MeanAccumulator
{
    double sum = 0.0;
    double sum2 = 0.0;
    std::uint64_t n = 0;

    void add(double x)
    {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : nan_value; }
    double stderr_of_mean() const
    {
        if (n < 2)
            return nan_value;
        const double m = mean();
        const double var = std::max(0.0, (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

inline PilotFrame full_frame(const SystemConfig &cfg, std::uint64_t seed) { return design_pilots(cfg.n(), cfg.q1, derive_seed(seed, 1)); }

// Monte-Carlo LS MSE (1/N normalizer) of one scenario.
inline MeanAccumulator monte_carlo_ls_mse(const SystemConfig &cfg, const ChannelSet &set, const PilotFrame &frame, int draws,
                                          std::uint64_t seed)
{
    const LsSolver solver(frame);
    MeanAccumulator acc;
    for (int d = 0; d < draws; ++d)
    {
        const RxFrame rx = synthesize_rx_frame(cfg, set, frame, derive_seed(seed, static_cast<std::uint64_t>(d)));
        acc.add(empirical_mse(solver.solve(rx), set.h.matrix_h, cfg.n()));
    }
    return acc;
}

// ---------- paf-sweep ----------

struct PafSweepResult
{
    Table table;
    std::vector<std::pair<double, PafSolution>> optima; // (sigma2_irs_dbm, solution)
};

inline PafSweepResult run_paf_sweep(const SystemConfig &cfg, const std::vector<double> &betas, const std::vector<double> &curves_dbm,
                                    int draws, std::uint64_t seed)
{
    require(!betas.empty() && !curves_dbm.empty(), ErrorCode::invalid_argument, "sweep grids must not be empty");
    for (double b : betas)
        require(b > 0.0 && b < 1.0, ErrorCode::invalid_argument, "beta grid values must lie in (0, 1)");
    require(draws >= 0, ErrorCode::invalid_argument, "draws must be non-negative");
    PafSweepResult out;
    out.table.command = "paf-sweep";
    out.table.columns = {"sigma2_irs_dbm", "beta", "mse_analytic", "mse_monte_carlo", "mse_mc_stderr", "beta_opt", "mse_at_opt", "is_opt"};
    const ChannelSet set = nominal_channels(cfg);
    const PilotFrame frame = full_frame(cfg, seed);
    const PafTerms terms = paf_terms(set, frame);
    for (std::size_t c = 0; c < curves_dbm.size(); ++c)
    {
        SystemConfig curve = cfg;
        curve.sigma2_irs_w = dbm_to_watts(curves_dbm[c]);
        const PafCoefficients coef = mse_coefficients(curve.total_power_w, curve.sigma2_bs_w, curve.sigma2_irs_w, terms);
        const PafSolution sol = optimal_beta(coef);
        out.optima.emplace_back(curves_dbm[c], sol);
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < betas.size(); ++i)
            if (std::abs(betas[i] - sol.beta_opt) < std::abs(betas[nearest] - sol.beta_opt))
                nearest = i;
        for (std::size_t i = 0; i < betas.size(); ++i)
        {
            curve.beta = betas[i];
            MeanAccumulator mc;
            if (draws > 0)
                mc = monte_carlo_ls_mse(curve, set, frame, draws, derive_seed(seed, 1000 + c * betas.size() + i));
            out.table.add({curves_dbm[c], betas[i], mse_beta(coef, betas[i]), mc.mean(), mc.stderr_of_mean(), sol.beta_opt,
                           sol.mse_at_opt, i == nearest ? 1.0 : 0.0});
        }
    }
    return out;
}

// ---------- k-sweep ----------

struct KSweepResult
{
    Table table;
    std::vector<ErrorBudget> ladder;
    KOptResult kopt;
    nlohmann::json summary;
};

inline KSweepResult run_k_sweep(const SystemConfig &cfg, std::uint64_t seed)
{
    KSweepResult out;
    const ChannelSet set = nominal_channels(cfg);
    out.ladder = ladder_budgets(cfg, set, derive_seed(seed, 2));
    out.kopt = optimal_k(out.ladder, cfg.n());
    out.table.command = "k-sweep";
    out.table.columns = {"k", "k_y", "k_z", "s_y", "s_z", "q2", "eps_approx_direct", "eps_approx_closed", "eps_est", "eps_total", "c2", "c3", "is_opt"};
    for (const auto &b : out.ladder)
        out.table.add({double(b.k), double(b.plan.k_y), double(b.plan.k_z), double(b.plan.s_y), double(b.plan.s_z),
                       double(block_pilot_length(cfg, b.plan)), b.eps_approx_direct, b.eps_approx_closed, b.eps_est, b.eps_total,
                       b.c2, b.c3, b.k == out.kopt.k_opt ? 1.0 : 0.0});
    auto &s = out.summary;
    s["k_opt"] = out.kopt.k_opt;
    s["plan"] = {{"k_y", out.kopt.plan.k_y}, {"k_z", out.kopt.plan.k_z}, {"s_y", out.kopt.plan.s_y}, {"s_z", out.kopt.plan.s_z}};
    s["exhaustive_k"] = out.kopt.exhaustive_k;
    s["agrees_with_exhaustive"] = out.kopt.agrees_with_exhaustive;
    s["fixed_point_iterations"] = out.kopt.fixed_point_iterations;
    s["refinement_steps"] = out.kopt.refinement_steps;
    if (out.kopt.quintic)
    {
        const auto &q = *out.kopt.quintic;
        s["newton_root"] = q.newton_root;
        s["newton_iterations"] = q.newton_iterations;
        nlohmann::json roots = nlohmann::json::array();
        for (const auto &r : q.roots)
            roots.push_back({r.real(), r.imag()});
        s["quintic_roots"] = roots;
    }
    return out;
}

// ---------- eval-import ----------

inline double nmse(const CMatrix &estimate, const CMatrix &truth)
{
    const double p = truth.squaredNorm();
    require(p > 0.0, ErrorCode::invalid_argument, "reference channel has zero power");
    return (estimate - truth).squaredNorm() / p;
}

// Scores a prediction file against a dataset: mean per-record NMSE against
// the ground truth and against the LS labels, overall and per SNR.
inline nlohmann::json eval_import(const std::string &pred_stem, const std::string &dataset_stem)
{
    const DatasetHeader h = read_header(dataset_stem);
    int m = 0, s = 0;
    const auto preds = load_predictions(pred_stem, m, s);
    require(m == h.m && s == h.s, ErrorCode::shape_mismatch, "prediction shape disagrees with the dataset");
    require(preds.size() == h.record_count, ErrorCode::shape_mismatch, "prediction count disagrees with the dataset");
    const auto records = load_records(dataset_stem);
    struct Acc
    {
        MeanAccumulator truth, label, ls;
    };
    Acc all;
    std::map<float, Acc> by_snr;
    for (std::size_t i = 0; i < records.size(); ++i)
    {
        const auto &r = records[i];
        const auto &p = preds[i];
        require(p.scenario_id == r.scenario_id && p.block_id == r.block_id && p.user_id == r.user_id, ErrorCode::id_mismatch,
                "prediction " + std::to_string(i) + " does not match the dataset record ids");
        const double vt = nmse(p.h_pred, r.h_true), vl = nmse(p.h_pred, r.h_label_ls), ls = nmse(r.h_label_ls, r.h_true);
        for (Acc *a : {&all, &by_snr[r.snr_db]})
        {
            a->truth.add(vt);
            a->label.add(vl);
            a->ls.add(ls);
        }
    }
    nlohmann::json out;
    out["record_count"] = records.size();
    out["nmse_vs_truth"] = all.truth.mean();
    out["nmse_vs_label"] = all.label.mean();
    out["ls_nmse_vs_truth"] = all.ls.mean();
    out["config_digest"] = h.config_digest;
    out["per_snr"] = nlohmann::json::array();
    for (const auto &[snr, a] : by_snr)
        out["per_snr"].push_back({{"snr_db", snr}, {"count", a.truth.n}, {"nmse_vs_truth", a.truth.mean()},
                                  {"nmse_vs_label", a.label.mean()}, {"ls_nmse_vs_truth", a.ls.mean()}});
    return out;
}

// ---------- mse-vs-snr ----------

struct MseSnrOptions
{
    int draws = 200;
    int lmmse_draws = 50;
    int training_draws = 2000;
    std::optional<nlohmann::json> imported; // eval_import metrics
};

// Random channel draws with the shared full-array pilot frame. The BS noise
// of each draw is used with both signs (antithetic pair) and rescaled per
// SNR row, so rows differ only by the noise level.
inline Table run_mse_vs_snr(const SystemConfig &cfg, const std::vector<double> &snrs, const MseSnrOptions &opt, std::uint64_t seed)
{
    require(!snrs.empty(), ErrorCode::invalid_argument, "SNR grid must not be empty");
    require(opt.draws >= 1 && opt.lmmse_draws >= 0 && opt.training_draws >= 2, ErrorCode::invalid_argument, "invalid draw counts");
    const PilotFrame frame = full_frame(cfg, seed);
    const LsSolver solver(frame);

    std::vector<CMatrix> training;
    for (int i = 0; i < opt.training_draws; ++i)
    {
        Rng rng = Rng::stream(derive_seed(seed, 3), static_cast<std::uint64_t>(i));
        training.push_back(draw_channels(cfg, rng).h.matrix_h);
    }
    const ChannelStats stats = estimate_channel_stats(training);

    const std::size_t rows = snrs.size();
    std::vector<MeanAccumulator> ls(rows), lm(rows), crg(rows), crc(rows), lsn(rows);
    SystemConfig unit = cfg;
    unit.sigma2_bs_w = 1.0;
    for (int d = 0; d < opt.draws; ++d)
    {
        Rng rng = Rng::stream(derive_seed(seed, 4), static_cast<std::uint64_t>(d));
        const ChannelSet set = draw_channels(cfg, rng);
        const RxComponents parts = synthesize_rx_components(unit, set, frame, rng.next_u64());
        const double signal_power = parts.signal.squaredNorm() / static_cast<double>(parts.signal.size());
        for (std::size_t r = 0; r < rows; ++r)
        {
            SystemConfig row = cfg;
            row.sigma2_bs_w = signal_power / std::pow(10.0, snrs[r] / 10.0);
            const double scale = std::sqrt(row.sigma2_bs_w);
            double e_ls = 0.0, e_lm = 0.0, e_n = 0.0;
            for (double sign : {1.0, -1.0})
            {
                const RxFrame rx = parts.combine(1.0, sign * scale);
                const CMatrix h_ls = solver.solve(rx);
                e_ls += 0.5 * empirical_mse(h_ls, set.h.matrix_h, cfg.n());
                e_n += 0.5 * nmse(h_ls, set.h.matrix_h);
                if (d < opt.lmmse_draws)
                    e_lm += 0.5 * empirical_mse(lmmse(frame, rx, set.g.matrix_g, stats, row.sigma2_irs_w, row.sigma2_bs_w).h_hat,
                                                set.h.matrix_h, cfg.n());
            }
            ls[r].add(e_ls);
            lsn[r].add(e_n);
            if (d < opt.lmmse_draws)
                lm[r].add(e_lm);
            const CrlbResult c = compute_crlb(row, set, frame);
            crg[r].add(c.gamma_total / cfg.n());
            crc[r].add(c.closed_form_value / cfg.n());
        }
    }

    Table t;
    t.command = "mse-vs-snr";
    t.columns = {"snr_db", "ls_mse", "ls_mse_stderr", "lmmse_mse", "crlb_general", "crlb_closed", "ls_nmse", "imported_nmse_vs_truth",
                 "imported_ls_nmse_vs_truth"};
    for (std::size_t r = 0; r < rows; ++r)
    {
        double imp = nan_value, imp_ls = nan_value;
        if (opt.imported)
            for (const auto &e : opt.imported->at("per_snr"))
                if (std::abs(e.at("snr_db").get<double>() - snrs[r]) < 1e-4)
                {
                    imp = e.at("nmse_vs_truth").get<double>();
                    imp_ls = e.at("ls_nmse_vs_truth").get<double>();
                }
        t.add({snrs[r], ls[r].mean(), ls[r].stderr_of_mean(), lm[r].mean(), crg[r].mean(), crc[r].mean(), lsn[r].mean(), imp, imp_ls});
    }
    return t;
}

// ---------- crlb ----------

struct CrlbSweepResult
{
    Table table;
    nlohmann::json summary;
};

// Nominal scenario; sigma^2 set per row from the SNR definition of the datasets.
inline CrlbSweepResult run_crlb(const SystemConfig &cfg, const std::vector<double> &snrs, int draws, std::uint64_t seed)
{
    require(!snrs.empty(), ErrorCode::invalid_argument, "SNR grid must not be empty");
    const ChannelSet set = nominal_channels(cfg);
    const PilotFrame frame = full_frame(cfg, seed);
    SystemConfig unit = cfg;
    unit.sigma2_bs_w = 1.0;
    const RxComponents ref = synthesize_rx_components(unit, set, frame, 0);
    const double signal_power = ref.signal.squaredNorm() / static_cast<double>(ref.signal.size());
    CrlbSweepResult out;
    out.table.command = "crlb";
    out.table.columns = {"snr_db", "sigma2_bs_w", "sigma_n2", "crlb_general", "crlb_closed", "closed_to_general", "ls_mse", "ls_mse_stderr"};
    out.summary["rows"] = nlohmann::json::array();
    for (std::size_t r = 0; r < snrs.size(); ++r)
    {
        SystemConfig row = cfg;
        row.sigma2_bs_w = signal_power / std::pow(10.0, snrs[r] / 10.0);
        const CrlbResult c = compute_crlb(row, set, frame);
        const MeanAccumulator mc = draws > 0 ? monte_carlo_ls_mse(row, set, frame, draws, derive_seed(seed, 5000 + r)) : MeanAccumulator{};
        out.table.add({snrs[r], row.sigma2_bs_w, c.sigma_n2, c.gamma_total / cfg.n(), c.closed_form_value / cfg.n(), c.closed_to_general,
                       mc.mean(), mc.stderr_of_mean()});
        out.summary["rows"].push_back({{"snr_db", snrs[r]}, {"gamma_real", c.gamma_real}, {"gamma_imag", c.gamma_imag},
                                       {"gamma_total", c.gamma_total}, {"closed_to_general", c.closed_to_general}});
    }
    return out;
}

} // namespace fieldlab

#endif
