#pragma once

#include <string>
#include <vector>

namespace axihelm {

/// Plain CSV table: one header row, numeric cells written with 17 significant
/// digits, deterministic row order.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);

}  // namespace axihelm
