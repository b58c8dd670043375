#include "aracusum/replay.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aracusum/error.hpp"
#include "aracusum/random.hpp"
#include "aracusum/simulation.hpp"

namespace aracusum {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
            field = field.substr(1, field.size() - 2);
        }
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<std::chrono::sys_days> parse_iso_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const char* s = text.data();
    if (std::from_chars(s, s + 4, y).ptr != s + 4) return std::nullopt;
    if (std::from_chars(s + 5, s + 7, m).ptr != s + 7) return std::nullopt;
    if (std::from_chars(s + 8, s + 10, d).ptr != s + 10) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

}  // namespace

RateMatrix parse_rate_matrix(std::istream& in) {
    RateMatrix matrix;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (line_no == 0 || trim(line).empty()) throw DataError("rate matrix is empty", line_no);
    {
        auto header = split_csv_line(line);
        if (header.size() < 2 || trim(header[0]) != "date") {
            throw DataError("header must be 'date,<region_1>,...,<region_K>'", line_no);
        }
        for (std::size_t k = 1; k < header.size(); ++k) {
            auto name = trim(header[k]);
            if (name.empty()) throw DataError("empty region name in header", line_no, k);
            matrix.region_names.push_back(std::move(name));
        }
    }
    const std::size_t K = matrix.region_names.size();

    std::optional<std::chrono::sys_days> previous;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::size_t row = matrix.rates.size() + 1;
        const std::string where = "row " + std::to_string(row) + " (line " + std::to_string(line_no) + ")";
        auto fields = split_csv_line(line);
        if (fields.size() != K + 1) {
            throw DataError(where + ": expected " + std::to_string(K + 1) + " fields, found " +
                                std::to_string(fields.size()),
                            line_no);
        }
        const std::string date = trim(fields[0]);
        const auto day = parse_iso_date(date);
        if (!day) throw DataError(where + ": invalid ISO-8601 date '" + date + "'", line_no, 0);
        if (previous && *day != *previous + std::chrono::days{1}) {
            throw DataError(where + ": date " + date + " does not follow the previous row by one day", line_no, 0);
        }
        previous = day;

        std::vector<double> values(K);
        for (std::size_t k = 0; k < K; ++k) {
            const std::string cell = trim(fields[k + 1]);
            const std::string at = "row " + std::to_string(row) + ", column " + std::to_string(k + 1) + " (" +
                                   matrix.region_names[k] + ", line " + std::to_string(line_no) + ")";
            double v = 0.0;
            const char* end = cell.data() + cell.size();
            const auto res = std::from_chars(cell.data(), end, v);
            if (cell.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
                throw DataError("missing or non-numeric rate '" + cell + "' at " + at, line_no, k + 1);
            }
            if (v < 0.0 || v > 1.0) {
                throw DataError("rate " + cell + " outside [0,1] at " + at, line_no, k + 1);
            }
            values[k] = v;
        }
        matrix.dates.push_back(date);
        matrix.rates.push_back(std::move(values));
    }
    if (matrix.rates.empty()) throw DataError("rate matrix has no data rows", line_no);
    return matrix;
}

RateMatrix load_rate_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open rate matrix " + path.string());
    try {
        return parse_rate_matrix(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what(), e.line(), e.column());
    }
}

ReplayReport replay(const RateMatrix& matrix, const ModelParams& model, const AllocatorPolicy& policy,
                    const PriorConfig& prior, std::uint64_t seed, const ReplayOptions& options) {
    if (model.num_regions != matrix.num_regions()) {
        throw DimensionError("model has " + std::to_string(model.num_regions) + " regions, rate matrix has " +
                             std::to_string(matrix.num_regions()));
    }
    SurveillanceLoop loop(model, prior, policy);
    Rng rng(seed);
    std::vector<Count> positives(model.num_regions);
    ReplayReport report;

    for (std::size_t t = 0; t < matrix.num_days(); ++t) {
        const auto& tests = loop.allocation().counts;
        for (std::size_t k = 0; k < model.num_regions; ++k) {
            const double rate = matrix.rates[t][k];
            positives[k] = options.deterministic
                               ? static_cast<Count>(std::llround(static_cast<double>(tests[k]) * rate))
                               : sample_binomial(rng, tests[k], rate);
        }
        report.allocation_trace.push_back(tests);
        const AlarmReport alarm = loop.observe(positives);
        report.cusum_trace.push_back(loop.cusum().stats);
        report.days_monitored = t + 1;
        if (alarm.fired) {
            report.alarmed = true;
            report.alarm_day = t + 1;
            report.alarm_date = matrix.dates[t];
            report.alarmed_region = alarm.region;
            report.alarmed_region_name = matrix.region_names[*alarm.region];
            break;
        }
        loop.plan_next();
    }
    return report;
}

}  // namespace aracusum
