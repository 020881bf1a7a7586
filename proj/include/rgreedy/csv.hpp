#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rgreedy::csv {

/// Shortest round-trip decimal representation; locale independent. NaN is an empty field.
std::string format_number(double v);

/// Numeric CSV table with a single header line.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Throws ConfigError when the column is absent.
    std::size_t column_index(std::string_view name) const;
    bool has_column(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
};

/// Empty fields read as NaN. Throws ParseError with the offending line number.
Table parse(std::istream& in, const std::string& source_name);
Table read(const std::filesystem::path& path);

/// Writes header + rows, "\n" line endings.
void write(std::ostream& out, std::span<const std::string> header, const std::vector<std::vector<double>>& rows);
void write_file(const std::filesystem::path& path, std::span<const std::string> header,
                const std::vector<std::vector<double>>& rows);

/// Writes text to a file, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace rgreedy::csv
