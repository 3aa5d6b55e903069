#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace thyro {

inline constexpr const char* kToolName = "thyroidiomics";
inline constexpr const char* kToolVersion = "0.1.0";

/// Serialize a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Write content to path atomically (temp file in the same directory + rename).
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Run fn(i) for i in [0, n) on `workers` threads with strided assignment.
/// Callers must write results into preallocated per-index slots so the
/// outcome is independent of scheduling. Exceptions are rethrown, lowest
/// index first.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

int default_workers();

}  // namespace thyro
