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

#include "fmoo/dataset_io.h"

#include <cstring>
#include <fstream>
#include <string>

#include "fmoo/errors.h"

namespace fmoo {
namespace {

constexpr char kMagic[4] = {'F', 'M', 'D', 'S'};

template <typename T>
void WritePod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ConfigError("truncated dataset file while reading " + what, "problem.dataset_file");
  }
  return v;
}

}  // namespace

void WriteDataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open for writing: " + path.string(), "problem.dataset_file");
  const std::uint64_t d = static_cast<std::uint64_t>(data.features.cols());
  const std::uint64_t n = static_cast<std::uint64_t>(data.features.rows());
  const std::uint64_t s = static_cast<std::uint64_t>(data.task_labels.cols());
  os.write(kMagic, 4);
  WritePod(os, kDatasetFormatVersion);
  WritePod(os, d);
  WritePod(os, n);
  WritePod(os, s);
  for (std::uint64_t r = 0; r < n; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    for (std::uint64_t k = 0; k < d; ++k) WritePod(os, data.features(row, static_cast<Eigen::Index>(k)));
    for (std::uint64_t k = 0; k < s; ++k) WritePod(os, data.task_labels(row, static_cast<Eigen::Index>(k)));
    WritePod(os, static_cast<double>(data.classes[r]));
  }
  if (!os) throw ConfigError("write failed: " + path.string(), "problem.dataset_file");
}

Dataset ReadDataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open dataset: " + path.string(), "problem.dataset_file");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("not a dataset file (bad magic): " + path.string(), "problem.dataset_file");
  }
  const auto version = ReadPod<std::uint32_t>(is, "version");
  if (version != kDatasetFormatVersion) {
    throw ConfigError("unsupported dataset version " + std::to_string(version),
                      "problem.dataset_file");
  }
  const auto d = ReadPod<std::uint64_t>(is, "d");
  const auto n = ReadPod<std::uint64_t>(is, "n");
  const auto s = ReadPod<std::uint64_t>(is, "S");
  if (d == 0 || n == 0 || s == 0 || d > (1u << 20) || s > (1u << 20) || n > (1ull << 32)) {
    throw ConfigError("implausible dataset header", "problem.dataset_file");
  }
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  data.task_labels.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s));
  data.classes.resize(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    for (std::uint64_t k = 0; k < d; ++k) data.features(row, static_cast<Eigen::Index>(k)) = ReadPod<double>(is, "row");
    for (std::uint64_t k = 0; k < s; ++k) data.task_labels(row, static_cast<Eigen::Index>(k)) = ReadPod<double>(is, "row");
    data.classes[r] = static_cast<int>(ReadPod<double>(is, "row"));
  }
  return data;
}

}  // namespace fmoo
