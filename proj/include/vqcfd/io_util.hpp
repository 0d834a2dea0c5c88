#pragma once

#include <cstdint>
#include <string>

namespace vqcfd::util {

std::string read_file(const std::string& path);

/// Writes to a temp file in the target directory and renames into place, so
/// readers never observe a half-written file. Creates parent directories.
void atomic_write_file(const std::string& path, const std::string& content);

/// Shortest-width fixed formatting used for all CSV/JSON numeric output:
/// "%.17g" round-trips doubles and keeps byte-identical reruns.
std::string fmt_double(double v);

/// 64-bit mix used to derive independent RNG streams from a base seed.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace vqcfd::util
