// Copyright 2026 The lobmix Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "lobmix/experiment.hpp"

namespace lobmix {

/// Marker written last into every finished run directory.
inline constexpr const char* kCompleteMarker = "COMPLETE";

/**
 * Builds a long-tailed manifest from cfg.dataset and cfg.profile and writes
 * it to <cfg.out>/manifest.json. Prints the counts and imbalance ratio.
 */
void cmd_build_lt(const ExperimentConfig& cfg, std::ostream& log);

/**
 * Writes occurrence_<combo>.csv for each requested sampler combo plus
 * occurrence_summary.csv into cfg.out. With cfg.samples == 0 only the
 * analytic columns are filled.
 */
void cmd_analyze(const ExperimentConfig& cfg, std::ostream& log);

/// Trains per cfg.train and writes config.json, history.csv, eval.json,
/// occurrence CSVs and the completion marker into cfg.out.
void cmd_train(const ExperimentConfig& cfg, std::ostream& log);

/**
 * Aggregates finished runs into aggregate.csv (one row per strategy, mean and
 * sample std). Each path is a run directory or a parent of run directories;
 * parents contribute only their completed children.
 */
void cmd_report(std::span<const std::filesystem::path> runs, const std::filesystem::path& out, std::ostream& log);

}  // namespace lobmix
