#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mfl {

/// Canonical number formatting shared by every serialized artifact so that
/// identical runs produce byte-identical files ("%.12g", with "inf"/"nan"
/// spelled out).
std::string format_number(double v);

/// Writes `content` to `path` via a temporary sibling plus rename, so readers
/// never observe a partial file.  Parent directories are created on demand.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Minimal CSV builder: a fixed header row, then data rows of equal width.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    /// Appends a row; throws ConfigError if the cell count mismatches.
    void add_row(const std::vector<std::string>& cells);

    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace mfl
