#pragma once

#include <filesystem>
#include <string>

namespace dtwin::util {

/// Whole-file helpers; failures raise Error(Io) naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace dtwin::util
