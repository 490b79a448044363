#include "lowlying/format.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lowlying {

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t fnv1a64_file(const std::filesystem::path& p) {
    return fnv1a64(read_file(p));
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open " + tmp.string());
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!f)
            throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace lowlying
