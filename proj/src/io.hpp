#pragma once

#include <filesystem>
#include <string>
#include <vector>

// File helpers shared by the store readers and writers.
namespace expert::io {

/// All lines of a text file with trailing CR stripped. Throws NotFound if the
/// file does not exist.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace expert::io
