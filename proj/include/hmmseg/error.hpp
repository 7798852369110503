// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmmseg {

enum class ErrorCode {
  invalid_argument,
  invalid_data,
  degenerate_statistics,
  inconsistent_prior,
  missing_model,
  infeasible_alignment,
  no_valid_path,
  empty_corpus,
  io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_data: return "invalid data";
    case ErrorCode::degenerate_statistics: return "degenerate statistics";
    case ErrorCode::inconsistent_prior: return "inconsistent prior";
    case ErrorCode::missing_model: return "missing model";
    case ErrorCode::infeasible_alignment: return "infeasible alignment";
    case ErrorCode::no_valid_path: return "no valid path";
    case ErrorCode::empty_corpus: return "empty corpus";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's exit status) can distinguish data problems from
/// programming errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace hmmseg
