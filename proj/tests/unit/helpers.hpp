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

#ifndef FIELDLAB_TEST_HELPERS_HPP
#define FIELDLAB_TEST_HELPERS_HPP

#include "fieldlab/fieldlab.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

namespace fieldlab_test
{

using namespace fieldlab;

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double rel_frob(const CMatrix &a, const CMatrix &b) { return (a - b).norm() / b.norm(); }

// Small scenario used where the default 49-element IRS is needlessly slow.
inline SystemConfig small_config(int n_side = 3, int m_side = 2)
{
    SystemConfig cfg;
    cfg.m_y = cfg.m_z = m_side;
    cfg.n_y = cfg.n_z = n_side;
    cfg.q1 = cfg.n();
    return cfg;
}

// Fresh scratch directory under the system temp path, removed on destruction.
struct ScratchDir
{
    std::filesystem::path path;

    explicit ScratchDir(const std::string &tag)
    {
        path = std::filesystem::temp_directory_path() / ("fieldlab_" + tag + "_" + std::to_string(Rng(std::random_device{}()).next_u64()));
        std::filesystem::create_directories(path);
    }
    ~ScratchDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string stem(const std::string &name) const { return (path / name).string(); }
};

inline std::string slurp(const std::string &file)
{
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace fieldlab_test

#endif
