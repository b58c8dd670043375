#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace aracusum {

/// Numbers in every output file carry 12 significant digits.
inline constexpr int kOutputDigits = 12;

std::string format_real(double value);
/// `value` rounded to kOutputDigits significant digits, for JSON payloads.
double round_output(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace aracusum
