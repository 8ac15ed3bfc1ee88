#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace stylo::io {

std::string read_file(const std::filesystem::path& path);

// Writes bytes exactly as given (binary mode, so LF stays LF). Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace stylo::io
