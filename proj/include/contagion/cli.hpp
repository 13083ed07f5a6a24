#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

namespace contagion {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Entry point of the `contagion` tool. Returns the process exit code:
// 0 ok, 2 schema/data error, 3 unknown user or missing file, 4 bad
// configuration.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Hex SHA-256 of a file's contents.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace contagion
