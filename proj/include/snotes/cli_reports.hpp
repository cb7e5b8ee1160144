#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "snotes/expectation_engine.hpp"
#include "snotes/product_model.hpp"

namespace snotes {

inline constexpr const char* kVersion = "0.1.0";

/// Two decimal places, round half to even, "-0.00" normalized to "0.00".
std::string money_display(double amount);

/// Four significant figures for report `display` fields.
std::string display_4sig(double value);

/// Shortest decimal string that round-trips the exact double.
std::string full_precision(double value);

/// 64-bit FNV-1a over a file's raw bytes, rendered as 16 hex digits; used
/// to stamp input files into report provenance.
std::string file_digest(const std::string& path);

/// Runs one CLI invocation. `args` excludes the program name. Normal and
/// error output go to the given streams. Returns the process exit code:
/// 0 success, 2 usage or domain error, 1 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snotes
