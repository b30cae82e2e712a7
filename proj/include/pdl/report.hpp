// Copyright 2026 The PDL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDL_REPORT_HPP_
#define PDL_REPORT_HPP_

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdl/version.hpp"

namespace pdl {

// Canonical text form of a real value: 9 significant digits, shortest
// representation, with unbounded values spelled inf/-inf.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// key=value report with keys emitted in lexicographic order, one line per
// entry. The single output format of every command.
class Report {
 public:
  void set(const std::string& key, const std::string& value) {
    if (key.empty() || key.find('=') != std::string::npos ||
        key.find('\n') != std::string::npos)
      throw std::invalid_argument("invalid report key: " + key);
    if (value.find('\n') != std::string::npos)
      throw std::invalid_argument("report values must be single-line");
    if (!entries_.emplace(key, value).second)
      throw std::invalid_argument("duplicate report key: " + key);
  }

  void set(const std::string& key, const char* value) {
    set(key, std::string(value));
  }

  void set(const std::string& key, double value) {
    set(key, format_real(value));
  }

  void set_int(const std::string& key, long long value) {
    set(key, std::to_string(value));
  }

  std::string str() const {
    std::string out;
    for (const auto& [key, value] : entries_) {
      out += key;
      out += '=';
      out += value;
      out += '\n';
    }
    return out;
  }

 private:
  std::map<std::string, std::string> entries_;
};

// Resolved parameters of one invocation, echoed into the report under
// manifest.* keys so any output can be replayed. Only parameters that
// determine the result belong here.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;

  void add(const std::string& name, const std::string& value) {
    params.emplace_back(name, value);
  }
  void add(const std::string& name, const char* value) {
    params.emplace_back(name, value);
  }
  void add(const std::string& name, double value) {
    params.emplace_back(name, format_real(value));
  }
  void add_int(const std::string& name, long long value) {
    params.emplace_back(name, std::to_string(value));
  }

  void write_to(Report* report) const {
    report->set("manifest.command", command);
    report->set("manifest.version", kVersion);
    for (const auto& [name, value] : params)
      report->set("manifest." + name, value);
  }
};

}  // namespace pdl

#endif  // PDL_REPORT_HPP_
