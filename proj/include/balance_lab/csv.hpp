#ifndef BALANCE_LAB_CSV_HPP
#define BALANCE_LAB_CSV_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace balance_lab {

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

/// Streaming CSV writer; the header is written on construction.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace balance_lab

#endif
