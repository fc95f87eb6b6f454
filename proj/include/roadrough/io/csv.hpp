#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "roadrough/core/error.hpp"

namespace roadrough::io {

/// Shortest-safe text for a double: 17 significant digits, '.' decimal.
inline std::string format_number(double v)
{
    if (!std::isfinite(v)) throw IoError("cannot write non-finite number");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_number(std::string_view s, const std::string& where)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || p != end || !std::isfinite(v))
        throw IoError(where + ": not a number: '" + std::string(s) + "'");
    return v;
}

inline long long parse_integer(std::string_view s, const std::string& where)
{
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || p != end)
        throw IoError(where + ": not an integer: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',')
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes through a temporary sibling so a failed write leaves no partial file.
inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    const auto tmp = path.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out << content;
        if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp + "' into place: " + ec.message());
}

/// Lines of a LF text file; a trailing CR is tolerated, blank lines skipped.
/// Each line keeps its 1-based number for diagnostics.
struct Line {
    std::size_t number;
    std::string_view text;
};

inline std::vector<Line> split_lines(std::string_view content)
{
    std::vector<Line> out;
    std::size_t start = 0, number = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        auto text = content.substr(start, end - start);
        ++number;
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        if (!text.empty()) out.push_back({number, text});
        start = end + 1;
    }
    return out;
}

/// Header check plus per-row field count check.
class CsvTable {
public:
    CsvTable(std::string content, std::string name) : content_(std::move(content)), name_(std::move(name))
    {
        lines_ = split_lines(content_);
        if (lines_.empty()) throw IoError(name_ + ": empty file");
    }
    CsvTable(const CsvTable&) = delete; // lines_ views into content_
    CsvTable& operator=(const CsvTable&) = delete;

    void expect_header(std::string_view header) const
    {
        if (lines_.front().text != header)
            throw IoError(name_ + ": expected header '" + std::string(header) + "', got '" +
                          std::string(lines_.front().text) + "'");
    }

    std::vector<std::string_view> header() const { return split_fields(lines_.front().text); }

    std::size_t rows() const { return lines_.size() - 1; }

    std::vector<std::string_view> row(std::size_t r, std::size_t n_fields) const
    {
        auto f = split_fields(lines_[r + 1].text);
        if (f.size() != n_fields)
            throw IoError(where(r) + ": expected " + std::to_string(n_fields) + " fields, got " +
                          std::to_string(f.size()));
        return f;
    }

    std::string where(std::size_t r) const { return name_ + " line " + std::to_string(lines_[r + 1].number); }

private:
    std::string content_;
    std::string name_;
    std::vector<Line> lines_;
};

} // namespace roadrough::io
