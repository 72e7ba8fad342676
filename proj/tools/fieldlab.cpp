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

// fieldlab command-line front end.
//
//   fieldlab <command> --config <path> --out <dir> --seed <u64> [--grid ...]
//
// Failures print {"error":{"code":...,"message":...}} on stderr and exit 2.

#include "fieldlab/fieldlab.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace
{

using namespace fieldlab;

// "start:stop:count" (inclusive, linear) or "a,b,c".
std::vector<double> parse_grid(const std::string &text)
{
    std::vector<double> out;
    auto number = [&](const std::string &s)
    {
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(s, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        require(used == s.size() && !s.empty(), ErrorCode::invalid_argument, "bad number '" + s + "' in grid '" + text + "'");
        return v;
    };
    if (text.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        require(parts.size() == 3, ErrorCode::invalid_argument, "range grid must be start:stop:count");
        const double a = number(parts[0]), b = number(parts[1]), n = number(parts[2]);
        require(n >= 1 && n == std::floor(n), ErrorCode::invalid_argument, "grid count must be a positive integer");
        const int count = static_cast<int>(n);
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    }
    else
    {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');)
            out.push_back(number(p));
    }
    require(!out.empty(), ErrorCode::invalid_argument, "grid is empty");
    return out;
}

void write_json(const std::string &path, const nlohmann::json &doc) { detail::write_text(path, doc.dump(2) + "\n"); }

struct Options
{
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string grid;
    std::string curves;
    int draws = -1;
    int lmmse_draws = 50;
    std::uint64_t records_per_user = 250;
    double train_fraction = 0.9;
    std::string dataset;
    std::string predictions;
};

int run(const std::string &command, const Options &o)
{
    const SystemConfig cfg = o.config.empty() ? SystemConfig{} : load_config(o.config);
    if (o.config.empty())
        cfg.validate();
    const std::uint64_t seed = o.seed_given ? o.seed : cfg.rng_seed;
    const std::string digest = config_digest(cfg);
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    require(!ec && std::filesystem::is_directory(o.out), ErrorCode::io_failure, "cannot create output directory '" + o.out + "'");
    const auto path = [&](const std::string &name) { return (std::filesystem::path(o.out) / name).string(); };
    const std::vector<double> snr_grid = o.grid.empty() ? cfg.snr_db : parse_grid(o.grid);

    if (command == "paf-sweep")
    {
        const auto betas = parse_grid(o.grid.empty() ? "0.05:0.95:19" : o.grid);
        std::vector<double> curves;
        if (o.curves.empty())
            for (double rel : {10.0, 0.0, -20.0, -30.0, -40.0})
                curves.push_back(watts_to_dbm(cfg.sigma2_bs_w) + rel);
        else
            curves = parse_grid(o.curves);
        const auto r = run_paf_sweep(cfg, betas, curves, o.draws < 0 ? 200 : o.draws, seed);
        write_csv(path("paf_sweep.csv"), r.table, digest, seed);
        nlohmann::json doc = {{"command", "paf-sweep"}, {"config_digest", digest}, {"seed", seed}, {"curves", nlohmann::json::array()}};
        for (const auto &[dbm, sol] : r.optima)
            doc["curves"].push_back({{"sigma2_irs_dbm", dbm}, {"beta_opt", sol.beta_opt}, {"mse_at_opt", sol.mse_at_opt}, {"candidates", sol.candidates}});
        write_json(path("paf_sweep.json"), doc);
    }
    else if (command == "k-sweep")
    {
        auto r = run_k_sweep(cfg, seed);
        write_csv(path("k_sweep.csv"), r.table, digest, seed);
        r.summary["command"] = "k-sweep";
        r.summary["config_digest"] = digest;
        r.summary["seed"] = seed;
        write_json(path("k_sweep.json"), r.summary);
    }
    else if (command == "mse-vs-snr")
    {
        MseSnrOptions opt;
        opt.draws = o.draws < 0 ? 200 : o.draws;
        opt.lmmse_draws = std::min(o.lmmse_draws, opt.draws);
        if (!o.predictions.empty() || !o.dataset.empty())
        {
            require(!o.predictions.empty() && !o.dataset.empty(), ErrorCode::invalid_argument,
                    "--predictions and --dataset must be given together");
            require(std::filesystem::exists(header_path(o.predictions)), ErrorCode::io_failure,
                    "prediction file '" + header_path(o.predictions) + "' not found");
            opt.imported = eval_import(o.predictions, o.dataset);
        }
        write_csv(path("mse_vs_snr.csv"), run_mse_vs_snr(cfg, snr_grid, opt, seed), digest, seed);
    }
    else if (command == "crlb")
    {
        auto r = run_crlb(cfg, snr_grid, o.draws < 0 ? 1000 : o.draws, seed);
        write_csv(path("crlb.csv"), r.table, digest, seed);
        r.summary["command"] = "crlb";
        r.summary["config_digest"] = digest;
        r.summary["seed"] = seed;
        write_json(path("crlb.json"), r.summary);
    }
    else if (command == "gen-dataset")
    {
        const BlockPlan plan = plan_from_config(cfg);
        const auto h = generate_dataset(cfg, plan, o.records_per_user, seed, path("dataset"));
        const auto [train, test] = split_dataset(path("dataset"), o.train_fraction, path("dataset_train"), path("dataset_test"));
        write_json(path("manifest.json"), {{"command", "gen-dataset"}, {"config_digest", digest}, {"seed", seed},
                                           {"record_count", h.record_count}, {"train_count", train.record_count},
                                           {"test_count", test.record_count}, {"stems", {"dataset", "dataset_train", "dataset_test"}}});
    }
    else if (command == "eval-import")
    {
        require(!o.predictions.empty() && !o.dataset.empty(), ErrorCode::invalid_argument, "eval-import needs --predictions and --dataset");
        auto metrics = eval_import(o.predictions, o.dataset);
        metrics["command"] = "eval-import";
        write_json(path("eval_import.json"), metrics);
    }
    else
        throw Error(ErrorCode::invalid_argument, "unknown command '" + command + "'");
    return 0;
}

int fail(std::string_view code, const std::string &message)
{
    std::cerr << nlohmann::json{{"error", {{"code", code}, {"message", message}}}}.dump() << std::endl;
    return 2;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"fieldlab: active-IRS hybrid-field channel estimation experiments"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"paf-sweep", "MSE versus the power-allocation factor, per IRS noise level"},
        {"k-sweep", "approximation, estimation and total error along the sub-block ladder"},
        {"mse-vs-snr", "LS / LMMSE / CRLB (and imported predictions) versus SNR"},
        {"crlb", "Cramer-Rao bound versus SNR, general and closed form"},
        {"gen-dataset", "write a labelled dataset and its 90/10 split"},
        {"eval-import", "score a prediction file against a dataset"},
    };
    for (const auto &[name, help] : commands)
    {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "JSON configuration (defaults if omitted)");
        sub->add_option("--out", o.out, "output directory")->required();
        sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t &s) { o.seed = s; o.seed_given = true; }, "base seed (default: config rng_seed)");
        sub->add_option("--grid", o.grid, "sweep grid: start:stop:count or a,b,c");
        sub->add_option("--draws", o.draws, "Monte-Carlo draws per grid point")->check(CLI::PositiveNumber);
        if (name == "paf-sweep")
            sub->add_option("--curves", o.curves, "IRS noise levels in dBm: start:stop:count or a,b,c");
        if (name == "mse-vs-snr")
            sub->add_option("--lmmse-draws", o.lmmse_draws, "draws evaluated with LMMSE")->check(CLI::NonNegativeNumber);
        if (name == "gen-dataset")
        {
            sub->add_option("--records-per-user", o.records_per_user, "records per user")->check(CLI::PositiveNumber);
            sub->add_option("--train-fraction", o.train_fraction, "train share of the split")->check(CLI::Range(0.0, 1.0));
        }
        if (name == "mse-vs-snr" || name == "eval-import")
        {
            sub->add_option("--dataset", o.dataset, "dataset stem (path without .header.json)");
            sub->add_option("--predictions", o.predictions, "prediction file stem");
        }
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return fail("invalid_argument", e.what());
    }
    try
    {
        return run(app.get_subcommands().front()->get_name(), o);
    }
    catch (const Error &e)
    {
        return fail(to_string(e.code()), e.what());
    }
    catch (const std::exception &e)
    {
        return fail("internal", e.what());
    }
}
