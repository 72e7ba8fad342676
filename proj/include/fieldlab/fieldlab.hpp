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

#ifndef FIELDLAB_FIELDLAB_HPP
#define FIELDLAB_FIELDLAB_HPP

#include "airlink.hpp"
#include "block_planner.hpp"
#include "channels.hpp"
#include "common.hpp"
#include "crlb.hpp"
#include "dataset.hpp"
#include "estimators.hpp"
#include "experiments.hpp"
#include "polynomial.hpp"
#include "power_alloc.hpp"
#include "random.hpp"
#include "sysmodel.hpp"

#endif
