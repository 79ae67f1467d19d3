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
#include <optional>
#include <string>
#include <vector>

namespace lobmix {

/// Six significant digits, printf "%.6g" style.
std::string format_float(double value);

/// Empty string for std::nullopt.
std::string format_float(const std::optional<double>& value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws if absent.
  std::size_t column(const std::string& name) const;
  /// Every row's cell in column `name`.
  std::vector<std::string> values(const std::string& name) const;
};

/// Minimal reader for the unquoted, comma-separated files this project writes.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace lobmix
