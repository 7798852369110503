// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace hmmseg::cli {

/// Exit status for failures caused by input data (missing files, bad formats,
/// dimension mismatches, infeasible corpora).
inline constexpr int kDataError = 2;
/// Exit status for command-line usage errors.
inline constexpr int kUsageError = 1;

/// Entry point of the `hmmseg` tool. Reports go to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hmmseg::cli
