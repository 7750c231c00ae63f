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

#ifndef FMOO_ERRORS_H_
#define FMOO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fmoo {

// Invalid experiment configuration, indicator matrix, or problem parameters.
// `path` names the offending field when known (e.g. "indicator[2]").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string path = {})
      : std::runtime_error(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A bad argument to a numerical routine (non-finite input, empty set, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A local or global iterate became non-finite or left the divergence ball.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long round, long client = -1,
                  long objective = -1, long step = -1)
      : std::runtime_error(what),
        round_(round), client_(client), objective_(objective), step_(step) {}
  long round() const { return round_; }
  long client() const { return client_; }
  long objective() const { return objective_; }
  long step() const { return step_; }

 private:
  long round_, client_, objective_, step_;
};

}  // namespace fmoo

#endif  // FMOO_ERRORS_H_
