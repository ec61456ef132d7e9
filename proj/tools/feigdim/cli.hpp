#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "feigdim/fixed_point.hpp"

namespace feigdim::cli {

struct RunConfig {
  std::string command;  // solve, dim, sweep, diagnose
  std::optional<int> ell;
  std::vector<int> ells;
  int p = 2;
  std::size_t degree = 40;
  int K = 0;
  std::size_t nc = 24;
  double tol = 1e-10;
  std::filesystem::path cache_dir;
  std::optional<std::filesystem::path> out;
  Precision precision = Precision::standard;
  std::optional<std::filesystem::path> seed_file;
  unsigned threads = 0;
};

/// "a:step:b" -> {a, a+step, ..., b}; a single integer is a one-element range.
std::vector<int> parse_ell_range(std::string_view spec);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. Exit codes: 0 success,
/// 1 usage error, 2 numerical failure (partial outputs may have been written).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace feigdim::cli
