// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace glvc {

// Exit-code contract: 0 success, 1 usage error, 2 data error,
// 3 internal invariant violation.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

#define GLVC_CHECK(cond, msg)                                  \
  do {                                                         \
    if (!(cond)) throw ::glvc::InternalError(std::string(msg)); \
  } while (0)

#define GLVC_REQUIRE(cond, msg)                             \
  do {                                                      \
    if (!(cond)) throw ::glvc::DataError(std::string(msg)); \
  } while (0)

}  // namespace glvc
