#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sparcs {

// Writes content to a sibling temp file and renames it over `path`, so
// readers never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace sparcs
