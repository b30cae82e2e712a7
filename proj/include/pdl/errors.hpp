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

#ifndef PDL_ERRORS_HPP_
#define PDL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pdl {

// File content that cannot be parsed: bad magic, malformed header,
// truncated or oversized payload. Distinct from io_error so callers can
// map "the file is wrong" and "the file cannot be reached" differently.
class format_error : public std::runtime_error {
 public:
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// The underlying stream failed: missing file, unreadable or unwritable path.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Two identical images have no finite peak signal-to-noise ratio.
class perfect_match_error : public std::domain_error {
 public:
  explicit perfect_match_error(const std::string& what)
      : std::domain_error(what) {}
};

}  // namespace pdl

#endif  // PDL_ERRORS_HPP_
