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

#ifndef FIELDLAB_DATASET_HPP
#define FIELDLAB_DATASET_HPP

#include "estimators.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

namespace fieldlab
{

inline constexpr const char *dataset_magic = "fieldlab-dataset";
inline constexpr const char *predictions_magic = "fieldlab-predictions";
inline constexpr int dataset_schema_version = 1;
inline constexpr const char *snr_definition =
    "10*log10 of the mean per-antenna per-slot signal power of the sub-frame over sigma2_bs; sigma2_irs fixed by the config";

struct DatasetRecord
{
    std::uint32_t scenario_id = 0;
    std::uint32_t block_id = 0;
    std::uint32_t user_id = 0;
    float snr_db = 0.0f;
    CMatrix y_block;    // M x Q2
    CMatrix h_label_ls; // M x S
    CMatrix h_true;     // M x S
};

struct DatasetHeader
{
    int schema_version = dataset_schema_version;
    int m = 0;
    int s = 0;
    int q2 = 0;
    std::uint64_t record_count = 0;
    std::string split_tag = "all";
    std::uint64_t base_seed = 0;
    std::uint64_t pilot_seed = 0;
    std::string config_digest;
    BlockPlan plan{};
    nlohmann::json config;

    std::size_t record_bytes() const { return 16 + 8 * static_cast<std::size_t>(m) * (q2 + 2 * s); }
};

inline std::string header_path(const std::string &stem) { return stem + ".header.json"; }
inline std::string records_path(const std::string &stem) { return stem + ".records.bin"; }

namespace detail
{

inline void put_u32(std::string &buf, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_f32(std::string &buf, double v) { put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

// Row-major, interleaved re/im.
inline void put_cmatrix(std::string &buf, const CMatrix &m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
        {
            put_f32(buf, m(r, c).real());
            put_f32(buf, m(r, c).imag());
        }
}

inline std::uint32_t get_u32(const unsigned char *p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float get_f32(const unsigned char *p) { return std::bit_cast<float>(get_u32(p)); }

inline CMatrix get_cmatrix(const unsigned char *&p, int rows, int cols)
{
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
        {
            const float re = get_f32(p), im = get_f32(p + 4);
            m(r, c) = Complex(re, im);
            p += 8;
        }
    return m;
}

inline void write_text(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io_failure, "cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    require(out.good(), ErrorCode::io_failure, "write to '" + path + "' failed");
}

inline nlohmann::json read_json(const std::string &path)
{
    std::ifstream in(path);
    require(in.good(), ErrorCode::io_failure, "cannot open '" + path + "'");
    try
    {
        nlohmann::json doc;
        in >> doc;
        return doc;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorCode::version_mismatch, "'" + path + "' is not a readable header: " + e.what());
    }
}

inline std::uintmax_t file_size(const std::string &path)
{
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    require(!ec, ErrorCode::io_failure, "cannot stat '" + path + "'");
    return size;
}

} // namespace detail

inline void encode_record(std::string &buf, const DatasetRecord &r, const DatasetHeader &h)
{
    require(r.y_block.rows() == h.m && r.y_block.cols() == h.q2 && r.h_label_ls.rows() == h.m && r.h_label_ls.cols() == h.s &&
                r.h_true.rows() == h.m && r.h_true.cols() == h.s,
            ErrorCode::shape_mismatch, "record shape disagrees with the header");
    detail::put_u32(buf, r.scenario_id);
    detail::put_u32(buf, r.block_id);
    detail::put_u32(buf, r.user_id);
    detail::put_f32(buf, r.snr_db);
    detail::put_cmatrix(buf, r.y_block);
    detail::put_cmatrix(buf, r.h_label_ls);
    detail::put_cmatrix(buf, r.h_true);
}

inline DatasetRecord decode_record(const unsigned char *p, const DatasetHeader &h)
{
    DatasetRecord r;
    r.scenario_id = detail::get_u32(p);
    r.block_id = detail::get_u32(p + 4);
    r.user_id = detail::get_u32(p + 8);
    r.snr_db = detail::get_f32(p + 12);
    p += 16;
    r.y_block = detail::get_cmatrix(p, h.m, h.q2);
    r.h_label_ls = detail::get_cmatrix(p, h.m, h.s);
    r.h_true = detail::get_cmatrix(p, h.m, h.s);
    return r;
}

inline nlohmann::json header_to_json(const DatasetHeader &h)
{
    nlohmann::json doc;
    doc["magic"] = dataset_magic;
    doc["schema_version"] = h.schema_version;
    doc["m"] = h.m;
    doc["s"] = h.s;
    doc["q2"] = h.q2;
    doc["record_count"] = h.record_count;
    doc["record_bytes"] = h.record_bytes();
    doc["split_tag"] = h.split_tag;
    doc["base_seed"] = h.base_seed;
    doc["pilot_seed"] = h.pilot_seed;
    doc["config_digest"] = h.config_digest;
    doc["plan"] = {{"k_y", h.plan.k_y}, {"k_z", h.plan.k_z}, {"s_y", h.plan.s_y}, {"s_z", h.plan.s_z}};
    doc["snr_definition"] = snr_definition;
    doc["endianness"] = "little";
    doc["config"] = h.config;
    return doc;
}

inline DatasetHeader header_from_json(const nlohmann::json &doc)
{
    require(doc.is_object() && doc.value("magic", std::string()) == dataset_magic, ErrorCode::version_mismatch,
            "not a fieldlab dataset header");
    require(doc.value("schema_version", -1) == dataset_schema_version, ErrorCode::version_mismatch,
            "unsupported dataset schema version");
    DatasetHeader h;
    try
    {
        h.m = doc.at("m").get<int>();
        h.s = doc.at("s").get<int>();
        h.q2 = doc.at("q2").get<int>();
        h.record_count = doc.at("record_count").get<std::uint64_t>();
        h.split_tag = doc.at("split_tag").get<std::string>();
        h.base_seed = doc.at("base_seed").get<std::uint64_t>();
        h.pilot_seed = doc.at("pilot_seed").get<std::uint64_t>();
        h.config_digest = doc.at("config_digest").get<std::string>();
        const auto &p = doc.at("plan");
        h.plan = {p.at("k_y").get<int>(), p.at("k_z").get<int>(), p.at("s_y").get<int>(), p.at("s_z").get<int>()};
        h.config = doc.at("config");
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorCode::version_mismatch, std::string("malformed dataset header: ") + e.what());
    }
    require(h.m >= 1 && h.s >= 1 && h.q2 >= 1, ErrorCode::version_mismatch, "dataset header has invalid shapes");
    return h;
}

// Reads and checks a header: the embedded config must reproduce the digest.
inline DatasetHeader read_header(const std::string &stem)
{
    DatasetHeader h = header_from_json(detail::read_json(header_path(stem)));
    require(config_digest(h.config) == h.config_digest, ErrorCode::digest_mismatch,
            "dataset config digest does not match its header");
    return h;
}

inline void write_dataset(const std::string &stem, DatasetHeader h, const std::vector<DatasetRecord> &records)
{
    require(!records.empty(), ErrorCode::invalid_argument, "refusing to write an empty dataset");
    h.record_count = records.size();
    std::string payload;
    payload.reserve(records.size() * h.record_bytes());
    for (const auto &r : records)
        encode_record(payload, r, h);
    detail::write_text(records_path(stem), payload);
    detail::write_text(header_path(stem), header_to_json(h).dump(2) + "\n");
}

// Records [begin, end) of a dataset; end defaults to record_count.
inline std::vector<DatasetRecord> load_records(const std::string &stem, std::uint64_t begin = 0,
                                               std::optional<std::uint64_t> end = std::nullopt)
{
    const DatasetHeader h = read_header(stem);
    const std::uint64_t stop = end.value_or(h.record_count);
    require(begin <= stop && stop <= h.record_count, ErrorCode::out_of_range, "record range outside the dataset");
    const std::size_t rb = h.record_bytes();
    require(detail::file_size(records_path(stem)) >= h.record_count * rb, ErrorCode::truncated, "dataset payload is truncated");
    std::ifstream in(records_path(stem), std::ios::binary);
    require(in.good(), ErrorCode::io_failure, "cannot open dataset payload");
    in.seekg(static_cast<std::streamoff>(begin * rb));
    std::vector<unsigned char> buf((stop - begin) * rb);
    in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    require(static_cast<std::size_t>(in.gcount()) == buf.size(), ErrorCode::truncated, "dataset payload is truncated");
    std::vector<DatasetRecord> out;
    out.reserve(stop - begin);
    for (std::uint64_t i = 0; i < stop - begin; ++i)
        out.push_back(decode_record(buf.data() + i * rb, h));
    return out;
}

// ---------- Generation ----------

struct GenerationResult
{
    DatasetHeader header;
    std::vector<DatasetRecord> records;
};

// records_per_user records for each of the p_users users, user-major. Each
// record draws its own geometry, block, and SNR from stream (seed, index);
// the sub-frame pilots are shared by the whole dataset.
inline GenerationResult generate_records(const SystemConfig &cfg, const BlockPlan &plan, std::uint64_t records_per_user,
                                         std::uint64_t seed)
{
    cfg.validate();
    check_plan(cfg, plan);
    require(records_per_user >= 1, ErrorCode::invalid_argument, "record count must be >= 1");
    GenerationResult out;
    DatasetHeader &h = out.header;
    h.m = cfg.m();
    h.s = plan.s_total();
    h.q2 = block_pilot_length(cfg, plan);
    h.base_seed = seed;
    h.pilot_seed = derive_seed(seed, 0x9110'75EEDULL);
    h.config_digest = config_digest(cfg);
    h.plan = plan;
    h.config = config_to_json(cfg);

    const auto frames = design_block_pilots(cfg, plan, h.pilot_seed);
    std::vector<LsSolver> solvers;
    for (const auto &f : frames)
        solvers.emplace_back(f);

    const std::uint64_t total = records_per_user * static_cast<std::uint64_t>(cfg.p_users);
    out.records.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i)
    {
        Rng rng = Rng::stream(seed, i);
        const ChannelSet set = draw_channels(cfg, rng);
        const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(plan.k_total())));
        const double snr_db = cfg.snr_db[rng.below(cfg.snr_db.size())];
        const std::uint64_t noise_seed = rng.next_u64();

        // noiseless pass fixes rho and the signal power, which set sigma^2
        const RxComponents parts = synthesize_rx_subcomponents(cfg, plan, k, set, frames[k], noise_seed);
        const double signal_power = parts.signal.squaredNorm() / static_cast<double>(parts.signal.size());
        const double sigma2 = signal_power / std::pow(10.0, snr_db / 10.0);
        SystemConfig draw_cfg = cfg;
        draw_cfg.sigma2_bs_w = sigma2;
        const RxFrame rx = synthesize_rx_subframe(draw_cfg, plan, k, set, frames[k], noise_seed);

        DatasetRecord r;
        r.scenario_id = static_cast<std::uint32_t>(i);
        r.block_id = static_cast<std::uint32_t>(k);
        r.user_id = static_cast<std::uint32_t>(i / records_per_user);
        r.snr_db = static_cast<float>(snr_db);
        r.y_block = rx.observations;
        r.h_label_ls = solvers[k].solve(rx);
        r.h_true = extract_block(cfg, plan, k, set).h_k;
        out.records.push_back(std::move(r));
    }
    h.record_count = total;
    return out;
}

inline DatasetHeader generate_dataset(const SystemConfig &cfg, const BlockPlan &plan, std::uint64_t records_per_user,
                                      std::uint64_t seed, const std::string &stem)
{
    GenerationResult g = generate_records(cfg, plan, records_per_user, seed);
    write_dataset(stem, g.header, g.records);
    return g.header;
}

// ---------- Splitting ----------

// Train counts per user: round(fraction * total) overall, distributed by
// largest remainder of fraction * n_u (ties to the lower user id).
inline std::map<std::uint32_t, std::uint64_t> split_counts(const std::map<std::uint32_t, std::uint64_t> &per_user, double train_fraction)
{
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::invalid_argument, "train fraction must lie in (0, 1)");
    std::uint64_t total = 0;
    for (const auto &[u, n] : per_user)
        total += n;
    const auto target = static_cast<std::uint64_t>(std::llround(train_fraction * static_cast<double>(total)));
    std::map<std::uint32_t, std::uint64_t> train;
    std::vector<std::pair<double, std::uint32_t>> remainders;
    std::uint64_t assigned = 0;
    for (const auto &[u, n] : per_user)
    {
        const double quota = train_fraction * static_cast<double>(n);
        auto base = static_cast<std::uint64_t>(std::floor(quota + 1e-9));
        base = std::min(base, n);
        train[u] = base;
        assigned += base;
        remainders.emplace_back(quota - static_cast<double>(base), u);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i)
        if (train[remainders[i].second] < per_user.at(remainders[i].second))
        {
            ++train[remainders[i].second];
            ++assigned;
        }
    require(assigned > 0 && assigned < total, ErrorCode::empty_split, "split leaves one side empty");
    return train;
}

struct SplitResult
{
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> test;
};

// Stratified by user; the first records of each user go to the train side.
inline SplitResult split_records(const std::vector<DatasetRecord> &records, double train_fraction)
{
    std::map<std::uint32_t, std::uint64_t> per_user;
    for (const auto &r : records)
        ++per_user[r.user_id];
    const auto quota = split_counts(per_user, train_fraction);
    std::map<std::uint32_t, std::uint64_t> taken;
    SplitResult out;
    for (const auto &r : records)
    {
        if (taken[r.user_id] < quota.at(r.user_id))
        {
            ++taken[r.user_id];
            out.train.push_back(r);
        }
        else
            out.test.push_back(r);
    }
    return out;
}

inline std::pair<DatasetHeader, DatasetHeader> split_dataset(const std::string &in_stem, double train_fraction,
                                                             const std::string &train_stem, const std::string &test_stem)
{
    const DatasetHeader h = read_header(in_stem);
    const SplitResult s = split_records(load_records(in_stem), train_fraction);
    DatasetHeader th = h, vh = h;
    th.split_tag = "train";
    vh.split_tag = "test";
    write_dataset(train_stem, th, s.train);
    write_dataset(test_stem, vh, s.test);
    th.record_count = s.train.size();
    vh.record_count = s.test.size();
    return {th, vh};
}

// ---------- Predictions ----------

struct PredictionRecord
{
    std::uint32_t scenario_id = 0;
    std::uint32_t block_id = 0;
    std::uint32_t user_id = 0;
    CMatrix h_pred; // M x S
};

inline void write_predictions(const std::string &stem, int m, int s, const std::vector<PredictionRecord> &preds)
{
    std::string payload;
    for (const auto &p : preds)
    {
        require(p.h_pred.rows() == m && p.h_pred.cols() == s, ErrorCode::shape_mismatch, "prediction shape disagrees with header");
        detail::put_u32(payload, p.scenario_id);
        detail::put_u32(payload, p.block_id);
        detail::put_u32(payload, p.user_id);
        detail::put_u32(payload, 0);
        detail::put_cmatrix(payload, p.h_pred);
    }
    nlohmann::json doc = {{"magic", predictions_magic}, {"schema_version", dataset_schema_version}, {"m", m}, {"s", s},
                          {"record_count", preds.size()}, {"record_bytes", 16 + 8 * m * s}, {"endianness", "little"}};
    detail::write_text(records_path(stem), payload);
    detail::write_text(header_path(stem), doc.dump(2) + "\n");
}

inline std::vector<PredictionRecord> load_predictions(const std::string &stem, int &m, int &s)
{
    const auto doc = detail::read_json(header_path(stem));
    require(doc.is_object() && doc.value("magic", std::string()) == predictions_magic &&
                doc.value("schema_version", -1) == dataset_schema_version,
            ErrorCode::version_mismatch, "not a fieldlab prediction header");
    m = doc.value("m", 0);
    s = doc.value("s", 0);
    const auto count = doc.value("record_count", std::uint64_t{0});
    require(m >= 1 && s >= 1, ErrorCode::version_mismatch, "prediction header has invalid shapes");
    const std::size_t rb = 16 + 8 * static_cast<std::size_t>(m) * s;
    std::ifstream in(records_path(stem), std::ios::binary);
    require(in.good(), ErrorCode::io_failure, "cannot open prediction payload");
    std::vector<unsigned char> buf(count * rb);
    in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    require(static_cast<std::size_t>(in.gcount()) == buf.size(), ErrorCode::truncated, "prediction payload is truncated");
    std::vector<PredictionRecord> out(count);
    for (std::uint64_t i = 0; i < count; ++i)
    {
        const unsigned char *p = buf.data() + i * rb;
        out[i].scenario_id = detail::get_u32(p);
        out[i].block_id = detail::get_u32(p + 4);
        out[i].user_id = detail::get_u32(p + 8);
        p += 16;
        out[i].h_pred = detail::get_cmatrix(p, m, s);
    }
    return out;
}

} // namespace fieldlab

#endif
