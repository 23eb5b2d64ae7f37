#pragma once

#include <filesystem>
#include <string>

namespace attmatch {

/// Writes `content` to `path` via a temp file in the same directory followed
/// by a rename, so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace attmatch
