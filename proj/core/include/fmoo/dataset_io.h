// Copyright 2026 The fmoo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FMOO_DATASET_IO_H_
#define FMOO_DATASET_IO_H_

#include <cstdint>
#include <filesystem>

#include "fmoo/problem.h"

namespace fmoo {

// Flat little-endian binary file:
//   char[4] "FMDS", u32 version, u64 d, u64 n, u64 S,
//   then n rows of (d features, S task labels, 1 class label) as float64.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

void WriteDataset(const std::filesystem::path& path, const Dataset& data);
// Throws ConfigError on a bad header, version, or truncated body.
Dataset ReadDataset(const std::filesystem::path& path);

}  // namespace fmoo

#endif  // FMOO_DATASET_IO_H_
