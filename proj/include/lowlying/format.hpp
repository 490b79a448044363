#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lowlying {

// Decimal with 12 significant digits, no locale. All numeric file output goes
// through this so reruns diff clean.
std::string fmt12(double x);

std::vector<std::string> split_csv_line(const std::string& line);

uint64_t fnv1a64(std::string_view data);
uint64_t fnv1a64_file(const std::filesystem::path& p);

// Write to <path>.tmp then rename. Partial writes never become visible.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

} // namespace lowlying
