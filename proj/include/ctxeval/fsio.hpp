#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ctxeval {

std::string read_text_file(const std::filesystem::path& path); // IoError on failure

/// Write-to-temp + rename, so partial files never appear at `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

} // namespace ctxeval
