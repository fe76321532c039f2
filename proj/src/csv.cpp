#include "nagd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nagd {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, result.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); rows_ = 0; }

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw std::logic_error("CsvWriter: row has " + std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(columns_));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            text_ += ',';
        }
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            text_ += '"';
            for (char c : f) {
                if (c == '"') {
                    text_ += '"';
                }
                text_ += c;
            }
            text_ += '"';
        } else {
            text_ += f;
        }
    }
    text_ += '\n';
    ++rows_;
}

void CsvWriter::write(const std::filesystem::path& path) const { write_file_atomically(path, text_); }

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace nagd
