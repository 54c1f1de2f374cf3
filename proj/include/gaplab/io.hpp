#pragma once

#include <string>

namespace gaplab {

// Reads the whole file; throws IoError with the path on failure.
std::string read_file(const std::string& path);

// Writes content to a temp file in the same directory, then renames over
// path, so a crash never leaves a partial report behind.
void atomic_write_file(const std::string& path, const std::string& content);

// Real formatted with 17 significant digits (round-trips a double).
std::string format_g17(double x);

}  // namespace gaplab
