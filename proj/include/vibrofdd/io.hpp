#pragma once

#include <filesystem>
#include <string>

namespace vibrofdd {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Writes to a temp file in the same directory, then renames into place.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace vibrofdd
