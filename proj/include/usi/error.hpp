// Copyright 2026 The USI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace usi {

// Broad failure classes; the C API and the CLI map these onto status and
// exit codes.
enum class ErrorKind {
  usage,     // caller passed an invalid argument
  data,      // input data is malformed or inconsistent
  internal,  // an invariant of the library itself was violated
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_usage(const std::string& what) {
  throw Error(ErrorKind::usage, what);
}
[[noreturn]] inline void throw_data(const std::string& what) {
  throw Error(ErrorKind::data, what);
}
[[noreturn]] inline void throw_internal(const std::string& what) {
  throw Error(ErrorKind::internal, what);
}

}  // namespace usi
