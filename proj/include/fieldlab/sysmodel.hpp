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

#ifndef FIELDLAB_SYSMODEL_HPP
#define FIELDLAB_SYSMODEL_HPP

#include "common.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace fieldlab
{

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    friend Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
};

// Position of a device relative to the IRS centre. `elevation_rad` is the
// user elevation angle; the power-allocation factor is a separate field of
// SystemConfig.
struct UserPlacement
{
    double r_m = 10.0;
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
    Complex path_gain{1.0, 0.0};

    void validate() const
    {
        require(r_m > 0.0, ErrorCode::invalid_argument, "user distance must be positive");
        require(std::abs(azimuth_rad) < pi / 2, ErrorCode::invalid_argument, "user azimuth must lie in (-pi/2, pi/2)");
        require(std::abs(elevation_rad) < pi / 2, ErrorCode::invalid_argument, "user elevation must lie in (-pi/2, pi/2)");
        require(std::abs(path_gain) > 0.0, ErrorCode::invalid_argument, "user path gain must be nonzero");
    }
};

// Departure/arrival angles of the planar IRS-to-BS path.
struct FarFieldAngles
{
    double bs_azimuth_rad = 0.4;
    double bs_elevation_rad = 0.1;
    double irs_azimuth_rad = -0.3;
    double irs_elevation_rad = 0.15;
};

// Sampling box for random device placements.
struct UserRange
{
    double r_min_m = 5.0;
    double r_max_m = 20.0;
    double angle_max_rad = pi / 3;
};

enum class RhoMode
{
    per_block, // amplification recomputed from each sub-block's channel and power share
    shared,    // one amplification factor from the full array, reused for every sub-frame
};

struct PlanShape
{
    int k_y = 1;
    int k_z = 1;
};

struct SystemConfig
{
    int m_y = 3;
    int m_z = 3;
    int n_y = 7;
    int n_z = 7;
    int p_users = 9;
    double total_power_w = 1.0;
    double beta = 0.5;
    double sigma2_bs_w = 1e-10;
    double sigma2_irs_w = 1e-10;
    double wavelength_m = 0.0107;
    double d_yb = 0.0107 / 2;
    double d_zb = 0.0107 / 2;
    double d_ya = 0.0107 / 2;
    double d_za = 0.0107 / 2;
    int q1 = 49;
    int q2 = 0; // 0: each sub-frame uses S pilots, the minimum for a square design
    std::uint64_t rng_seed = 1;

    double pathloss_exponent = 1.0;
    double irs_bs_distance_m = 0.5;
    FarFieldAngles g_angles{};
    UserRange user_range{};
    UserPlacement nominal_user{10.0, 3.0 * pi / 180.0, 2.0 * pi / 180.0, {1.0, 0.0}};
    RhoMode rho_mode = RhoMode::per_block;
    std::optional<PlanShape> block_plan{};
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};

    int m() const { return m_y * m_z; }
    int n() const { return n_y * n_z; }

    void validate() const
    {
        require(m_y >= 1 && m_z >= 1, ErrorCode::invalid_argument, "BS antenna counts must be >= 1");
        require(n_y >= 1 && n_z >= 1, ErrorCode::invalid_argument, "IRS element counts must be >= 1");
        require(p_users >= 1, ErrorCode::invalid_argument, "p_users must be >= 1");
        require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument, "beta must lie in (0, 1)");
        require(total_power_w > 0.0, ErrorCode::invalid_argument, "total power must be positive");
        require(sigma2_bs_w > 0.0 && sigma2_irs_w > 0.0, ErrorCode::invalid_argument, "noise variances must be positive");
        require(wavelength_m > 0.0, ErrorCode::invalid_argument, "wavelength must be positive");
        require(d_yb > 0.0 && d_zb > 0.0 && d_ya > 0.0 && d_za > 0.0, ErrorCode::invalid_argument, "element spacings must be positive");
        require(q1 >= n(), ErrorCode::invalid_argument, "q1 must be at least n_y*n_z for a right pseudo-inverse");
        require(q2 >= 0, ErrorCode::invalid_argument, "q2 must be non-negative");
        require(pathloss_exponent > 0.0, ErrorCode::invalid_argument, "pathloss exponent must be positive");
        require(irs_bs_distance_m > 0.0, ErrorCode::invalid_argument, "IRS-BS distance must be positive");
        require(user_range.r_min_m > 0.0 && user_range.r_max_m >= user_range.r_min_m, ErrorCode::invalid_argument, "invalid user distance range");
        require(user_range.angle_max_rad > 0.0 && user_range.angle_max_rad < pi / 2, ErrorCode::invalid_argument, "user angle range must lie in (0, pi/2)");
        nominal_user.validate();
        if (block_plan)
        {
            require(block_plan->k_y >= 1 && n_y % block_plan->k_y == 0, ErrorCode::invalid_argument, "block_plan.k_y must divide n_y");
            require(block_plan->k_z >= 1 && n_z % block_plan->k_z == 0, ErrorCode::invalid_argument, "block_plan.k_z must divide n_z");
        }
        require(!snr_db.empty(), ErrorCode::invalid_argument, "snr_db must not be empty");
    }
};

inline double dbm_to_watts(double level_dbm) { return std::pow(10.0, (level_dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Free-space amplitude (lambda / (4 pi d))^k.
inline double path_gain_magnitude(const SystemConfig &cfg, double distance_m)
{
    return std::pow(cfg.wavelength_m / (4.0 * pi * distance_m), cfg.pathloss_exponent);
}

// Coordinates of IRS element (iy, iz), given as centred offsets.
inline Vec3 element_position(const SystemConfig &cfg, double iy, double iz)
{
    require(is_centered_offset(iy, cfg.n_y) && is_centered_offset(iz, cfg.n_z), ErrorCode::out_of_range,
            "element index outside the IRS aperture");
    return {0.0, iy * cfg.d_ya, iz * cfg.d_za};
}

inline Vec3 user_position(const UserPlacement &p)
{
    const double ce = std::cos(p.elevation_rad);
    return {p.r_m * std::cos(p.azimuth_rad) * ce, p.r_m * std::sin(p.azimuth_rad) * ce, p.r_m * std::sin(p.elevation_rad)};
}

// ---------- JSON boundary ----------

namespace detail
{

inline double read_power(const nlohmann::json &doc, const std::string &stem, double fallback, std::set<std::string> &seen)
{
    const std::string w = stem + "_w";
    const std::string dbm = stem + "_dbm";
    require(!(doc.contains(w) && doc.contains(dbm)), ErrorCode::invalid_argument, "give only one of " + w + " and " + dbm);
    if (doc.contains(w))
    {
        seen.insert(w);
        return doc.at(w).get<double>();
    }
    if (doc.contains(dbm))
    {
        seen.insert(dbm);
        return dbm_to_watts(doc.at(dbm).get<double>());
    }
    return fallback;
}

inline void reject_unknown(const nlohmann::json &obj, const std::set<std::string> &allowed, const std::string &where)
{
    require(obj.is_object(), ErrorCode::invalid_argument, where + " must be a JSON object");
    for (const auto &item : obj.items())
        require(allowed.count(item.key()) == 1, ErrorCode::invalid_argument, "unknown key '" + item.key() + "' in " + where);
}

template <typename T>
void read_opt(const nlohmann::json &doc, const char *key, T &target, std::set<std::string> &seen)
{
    if (doc.contains(key))
    {
        target = doc.at(key).get<T>();
        seen.insert(key);
    }
}

} // namespace detail

// Parses a configuration document. Angles are in degrees, powers in W or dBm;
// omitted spacings default to half a wavelength. Unknown keys are rejected.
inline SystemConfig config_from_json(const nlohmann::json &doc)
{
    using detail::read_opt;
    SystemConfig cfg;
    std::set<std::string> seen;
    try
    {
        require(doc.is_object(), ErrorCode::invalid_argument, "configuration must be a JSON object");
        read_opt(doc, "m_y", cfg.m_y, seen);
        read_opt(doc, "m_z", cfg.m_z, seen);
        read_opt(doc, "n_y", cfg.n_y, seen);
        read_opt(doc, "n_z", cfg.n_z, seen);
        read_opt(doc, "p_users", cfg.p_users, seen);
        read_opt(doc, "beta", cfg.beta, seen);
        cfg.total_power_w = detail::read_power(doc, "total_power", cfg.total_power_w, seen);
        cfg.sigma2_bs_w = detail::read_power(doc, "sigma2_bs", cfg.sigma2_bs_w, seen);
        cfg.sigma2_irs_w = detail::read_power(doc, "sigma2_irs", cfg.sigma2_irs_w, seen);
        read_opt(doc, "wavelength_m", cfg.wavelength_m, seen);
        const double half = cfg.wavelength_m / 2;
        cfg.d_yb = cfg.d_zb = cfg.d_ya = cfg.d_za = half;
        read_opt(doc, "d_yb", cfg.d_yb, seen);
        read_opt(doc, "d_zb", cfg.d_zb, seen);
        read_opt(doc, "d_ya", cfg.d_ya, seen);
        read_opt(doc, "d_za", cfg.d_za, seen);
        read_opt(doc, "q1", cfg.q1, seen);
        read_opt(doc, "q2", cfg.q2, seen);
        read_opt(doc, "rng_seed", cfg.rng_seed, seen);
        read_opt(doc, "pathloss_exponent", cfg.pathloss_exponent, seen);
        read_opt(doc, "irs_bs_distance_m", cfg.irs_bs_distance_m, seen);

        if (doc.contains("g_angles_deg"))
        {
            const auto &a = doc.at("g_angles_deg");
            detail::reject_unknown(a, {"bs_azimuth", "bs_elevation", "irs_azimuth", "irs_elevation"}, "g_angles_deg");
            cfg.g_angles.bs_azimuth_rad = deg_to_rad(a.value("bs_azimuth", rad_to_deg(cfg.g_angles.bs_azimuth_rad)));
            cfg.g_angles.bs_elevation_rad = deg_to_rad(a.value("bs_elevation", rad_to_deg(cfg.g_angles.bs_elevation_rad)));
            cfg.g_angles.irs_azimuth_rad = deg_to_rad(a.value("irs_azimuth", rad_to_deg(cfg.g_angles.irs_azimuth_rad)));
            cfg.g_angles.irs_elevation_rad = deg_to_rad(a.value("irs_elevation", rad_to_deg(cfg.g_angles.irs_elevation_rad)));
            seen.insert("g_angles_deg");
        }
        if (doc.contains("user_range"))
        {
            const auto &u = doc.at("user_range");
            detail::reject_unknown(u, {"r_min_m", "r_max_m", "angle_max_deg"}, "user_range");
            cfg.user_range.r_min_m = u.value("r_min_m", cfg.user_range.r_min_m);
            cfg.user_range.r_max_m = u.value("r_max_m", cfg.user_range.r_max_m);
            cfg.user_range.angle_max_rad = deg_to_rad(u.value("angle_max_deg", rad_to_deg(cfg.user_range.angle_max_rad)));
            seen.insert("user_range");
        }
        if (doc.contains("user"))
        {
            const auto &u = doc.at("user");
            detail::reject_unknown(u, {"r_m", "azimuth_deg", "elevation_deg"}, "user");
            cfg.nominal_user.r_m = u.value("r_m", cfg.nominal_user.r_m);
            cfg.nominal_user.azimuth_rad = deg_to_rad(u.value("azimuth_deg", rad_to_deg(cfg.nominal_user.azimuth_rad)));
            cfg.nominal_user.elevation_rad = deg_to_rad(u.value("elevation_deg", rad_to_deg(cfg.nominal_user.elevation_rad)));
            seen.insert("user");
        }
        if (doc.contains("rho_mode"))
        {
            const auto mode = doc.at("rho_mode").get<std::string>();
            require(mode == "per_block" || mode == "shared", ErrorCode::invalid_argument, "rho_mode must be 'per_block' or 'shared'");
            cfg.rho_mode = mode == "shared" ? RhoMode::shared : RhoMode::per_block;
            seen.insert("rho_mode");
        }
        if (doc.contains("block_plan"))
        {
            const auto &b = doc.at("block_plan");
            detail::reject_unknown(b, {"k_y", "k_z"}, "block_plan");
            cfg.block_plan = PlanShape{b.at("k_y").get<int>(), b.at("k_z").get<int>()};
            seen.insert("block_plan");
        }
        read_opt(doc, "snr_db", cfg.snr_db, seen);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorCode::invalid_argument, std::string("malformed configuration: ") + e.what());
    }
    for (const auto &item : doc.items())
        require(seen.count(item.key()) == 1, ErrorCode::invalid_argument, "unknown configuration key '" + item.key() + "'");
    cfg.nominal_user.path_gain = path_gain_magnitude(cfg, cfg.nominal_user.r_m);
    cfg.validate();
    return cfg;
}

// Fully resolved form (SI units, degrees for angles); config_from_json of
// the result reproduces `cfg`.
inline nlohmann::json config_to_json(const SystemConfig &cfg)
{
    nlohmann::json doc;
    doc["m_y"] = cfg.m_y;
    doc["m_z"] = cfg.m_z;
    doc["n_y"] = cfg.n_y;
    doc["n_z"] = cfg.n_z;
    doc["p_users"] = cfg.p_users;
    doc["total_power_w"] = cfg.total_power_w;
    doc["beta"] = cfg.beta;
    doc["sigma2_bs_w"] = cfg.sigma2_bs_w;
    doc["sigma2_irs_w"] = cfg.sigma2_irs_w;
    doc["wavelength_m"] = cfg.wavelength_m;
    doc["d_yb"] = cfg.d_yb;
    doc["d_zb"] = cfg.d_zb;
    doc["d_ya"] = cfg.d_ya;
    doc["d_za"] = cfg.d_za;
    doc["q1"] = cfg.q1;
    doc["q2"] = cfg.q2;
    doc["rng_seed"] = cfg.rng_seed;
    doc["pathloss_exponent"] = cfg.pathloss_exponent;
    doc["irs_bs_distance_m"] = cfg.irs_bs_distance_m;
    doc["g_angles_deg"] = {{"bs_azimuth", rad_to_deg(cfg.g_angles.bs_azimuth_rad)},
                           {"bs_elevation", rad_to_deg(cfg.g_angles.bs_elevation_rad)},
                           {"irs_azimuth", rad_to_deg(cfg.g_angles.irs_azimuth_rad)},
                           {"irs_elevation", rad_to_deg(cfg.g_angles.irs_elevation_rad)}};
    doc["user_range"] = {{"r_min_m", cfg.user_range.r_min_m},
                         {"r_max_m", cfg.user_range.r_max_m},
                         {"angle_max_deg", rad_to_deg(cfg.user_range.angle_max_rad)}};
    doc["user"] = {{"r_m", cfg.nominal_user.r_m},
                   {"azimuth_deg", rad_to_deg(cfg.nominal_user.azimuth_rad)},
                   {"elevation_deg", rad_to_deg(cfg.nominal_user.elevation_rad)}};
    doc["rho_mode"] = cfg.rho_mode == RhoMode::shared ? "shared" : "per_block";
    if (cfg.block_plan)
        doc["block_plan"] = {{"k_y", cfg.block_plan->k_y}, {"k_z", cfg.block_plan->k_z}};
    doc["snr_db"] = cfg.snr_db;
    return doc;
}

inline SystemConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    require(in.good(), ErrorCode::io_failure, "cannot open configuration file '" + path + "'");
    nlohmann::json doc;
    try
    {
        in >> doc;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(ErrorCode::invalid_argument, "configuration '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

// 64-bit FNV-1a over the canonical JSON text, as 16 hex digits.
inline std::string config_digest(const nlohmann::json &canonical)
{
    const std::string text = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string config_digest(const SystemConfig &cfg) { return config_digest(config_to_json(cfg)); }

} // namespace fieldlab

#endif
