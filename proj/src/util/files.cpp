#include "dtwin/util/files.hpp"

#include "dtwin/error.hpp"

#include <fstream>
#include <sstream>

namespace dtwin::util {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out << contents;
    if (!out) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace dtwin::util
