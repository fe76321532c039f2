#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nagd {

/// Shortest decimal form that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// Collects CSV rows in memory and publishes them with a rename, so an
/// interrupted run never leaves a truncated file behind.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void row(const std::vector<std::string>& fields);

    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }

    void write(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

/// Writes `content` to `path` via a temporary sibling and rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

} // namespace nagd
