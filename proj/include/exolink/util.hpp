#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace exo {

inline constexpr const char* kVersionString = "1.0.0";
inline constexpr int kFormatVersion = 1;

/** Filesystem failures (open/read/write/rename). */
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** FNV-1a 64-bit content hash (config/spec fingerprints). */
std::uint64_t fnv1a64(std::string_view data);

std::string to_hex(std::uint64_t v);

/** Reads a whole file; throws IoError on failure. */
std::string read_file(const std::string& path);

/** Writes via a temp file + rename so readers never see partial content. */
void atomic_write_file(const std::string& path, std::string_view content);

/**
 * Runs fn(i) for i in [0, n) across `workers` threads with contiguous index
 * chunks. fn must only write to per-index slots; results are therefore
 * independent of the worker count.
 */
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

double monotonic_seconds();

}  // namespace exo
