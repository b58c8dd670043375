#include "aracusum/commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "aracusum/error.hpp"
#include "aracusum/replay.hpp"
#include "aracusum/report_io.hpp"

namespace aracusum {

using nlohmann::json;

namespace {

void prepare_output(const CliConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw DataError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
}

std::string region_label(const CliConfig& config, std::size_t k) {
    if (!config.region_names.empty()) return config.region_names[k];
    return "region_" + std::to_string(k + 1);
}

json point_json(const SweepPoint& p) {
    return {{"policy", std::string(to_string(p.policy.kind))},
            {"q", round_output(p.q)},
            {"decay", round_output(p.decay)},
            {"a", round_output(p.a)},
            {"b", round_output(p.b)}};
}

bool same_point(const json& entry, const SweepPoint& p) {
    auto close = [](const json& v, double x) {
        return v.is_number() && std::abs(v.get<double>() - round_output(x)) <= 1e-12 * std::max(1.0, std::abs(x));
    };
    return entry.value("policy", "") == to_string(p.policy.kind) && close(entry["q"], p.q) &&
           close(entry["decay"], p.decay) && close(entry["a"], p.a) && close(entry["b"], p.b);
}

// Threshold for one sweep point according to the configured mode. Returns
// the calibrated ARL0 when the threshold came from a calibration.
std::pair<double, std::optional<double>> resolve_threshold(const CliConfig& config, const SweepPoint& point,
                                                           const json* threshold_doc, std::ostream& log) {
    switch (config.threshold_mode) {
        case ThresholdMode::Fixed:
            return {config.sim.model.threshold, std::nullopt};
        case ThresholdMode::Auto: {
            const CalibrationResult cal = calibrate_threshold(config.at(point));
            if (config.verbosity > 0) {
                log << "calibrated " << point_json(point).dump() << " -> h=" << format_real(cal.threshold)
                    << " ARL0=" << format_real(cal.achieved_arl0) << '\n';
            }
            return {cal.threshold, cal.achieved_arl0};
        }
        case ThresholdMode::File: {
            const json& doc = *threshold_doc;
            if (doc.contains("calibrations")) {
                for (const auto& entry : doc["calibrations"]) {
                    if (same_point(entry, point)) {
                        return {entry.at("threshold").get<double>(), entry.at("achieved_arl0").get<double>()};
                    }
                }
            }
            throw ConfigError("model.threshold_file: no calibration for " + point_json(point).dump());
        }
    }
    return {0.0, std::nullopt};
}

}  // namespace

void cmd_calibrate(const CliConfig& config, std::ostream& log) {
    prepare_output(config);
    json entries = json::array();
    for (const auto& point : config.sweep()) {
        const SimulationConfig sim = config.at(point);
        const CalibrationResult cal = calibrate_threshold(sim);
        if (config.verbosity > 0) {
            log << "calibrated " << point_json(point).dump() << " -> h=" << format_real(cal.threshold)
                << " ARL0=" << format_real(cal.achieved_arl0) << " (" << cal.probes << " probes)\n";
        }
        json entry = point_json(point);
        entry["threshold"] = round_output(cal.threshold);
        entry["achieved_arl0"] = round_output(cal.achieved_arl0);
        entries.push_back(std::move(entry));
    }
    json doc;
    doc["threshold"] = entries.front()["threshold"];
    doc["achieved_arl0"] = entries.front()["achieved_arl0"];
    doc["target_arl0"] = round_output(config.sim.target_arl0);
    doc["arl_tolerance"] = round_output(config.sim.arl_tolerance);
    doc["replications"] = config.sim.replications;
    doc["base_seed"] = config.sim.base_seed;
    doc["max_steps"] = config.sim.max_steps;
    doc["generator_id"] = std::string(kGeneratorId);
    doc["calibrations"] = std::move(entries);
    write_json(config.output_dir / "threshold.json", doc);
}

void cmd_simulate(const CliConfig& config, std::ostream& log) {
    prepare_output(config);
    std::optional<json> threshold_doc;
    if (config.threshold_mode == ThresholdMode::File) {
        std::ifstream in(config.threshold_file);
        if (!in) throw ConfigError("model.threshold_file: cannot open " + config.threshold_file.string());
        try {
            threshold_doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("model.threshold_file: " + std::string(e.what()));
        }
    }

    CsvTable table;
    table.header = {"policy", "q",     "decay", "a",            "b",           "threshold",
                    "achieved_arl0", "arl1", "dp", "sdrl", "replications", "truncations"};
    json rows = json::array();
    for (const auto& point : config.sweep()) {
        const auto [h, arl0] = resolve_threshold(config, point, threshold_doc ? &*threshold_doc : nullptr, log);
        SimulationConfig sim = config.at(point);
        sim.model.threshold = h;
        const MetricsReport m = monte_carlo(sim);
        if (config.verbosity > 0) {
            log << point_json(point).dump() << " ARL1=" << format_real(m.arl) << " DP="
                << format_real(m.detection_precision) << " SDRL=" << format_real(m.sdrl) << '\n';
        }
        table.rows.push_back({std::string(to_string(point.policy.kind)), format_real(point.q),
                              format_real(point.decay), format_real(point.a), format_real(point.b),
                              format_real(h), arl0 ? format_real(*arl0) : "", format_real(m.arl),
                              format_real(m.detection_precision), format_real(m.sdrl),
                              std::to_string(m.replication_count), std::to_string(m.truncation_count)});
        json row = point_json(point);
        row["threshold"] = round_output(h);
        row["achieved_arl0"] = arl0 ? json(round_output(*arl0)) : json(nullptr);
        row["arl1"] = round_output(m.arl);
        row["dp"] = round_output(m.detection_precision);
        row["sdrl"] = round_output(m.sdrl);
        row["replications"] = m.replication_count;
        row["truncations"] = m.truncation_count;
        rows.push_back(std::move(row));
    }
    if (config.format == OutputFormat::Csv) {
        write_csv(config.output_dir / "metrics.csv", table);
    } else {
        write_json(config.output_dir / "metrics.json",
                   {{"generator_id", std::string(kGeneratorId)},
                    {"base_seed", config.sim.base_seed},
                    {"rows", std::move(rows)}});
    }
}

namespace {

CsvTable phase_table(const CliConfig& config, const PhaseSummary& phase) {
    CsvTable t;
    t.header = {"region", "name", "median", "q25", "q75", "mean", "min", "max"};
    for (std::size_t k = 0; k < phase.regions.size(); ++k) {
        const auto& r = phase.regions[k];
        t.rows.push_back({std::to_string(k + 1), region_label(config, k), format_real(r.median), format_real(r.q25),
                          format_real(r.q75), format_real(r.mean), std::to_string(r.min), std::to_string(r.max)});
    }
    return t;
}

json phase_json(const CliConfig& config, const PhaseSummary& phase) {
    json regions = json::array();
    for (std::size_t k = 0; k < phase.regions.size(); ++k) {
        const auto& r = phase.regions[k];
        regions.push_back({{"region", k + 1},
                           {"name", region_label(config, k)},
                           {"median", round_output(r.median)},
                           {"q25", round_output(r.q25)},
                           {"q75", round_output(r.q75)},
                           {"mean", round_output(r.mean)},
                           {"min", r.min},
                           {"max", r.max}});
    }
    return {{"days", phase.days}, {"regions", std::move(regions)}};
}

}  // namespace

void cmd_behavior(const CliConfig& config, std::ostream& log) {
    prepare_output(config);
    const BehaviorReport report = behavior_study(config.sim, config.ic_days, config.oc_days);
    if (config.verbosity > 0) {
        log << "behavior study: " << config.ic_days << " in-control days, " << config.oc_days
            << " out-of-control days\n";
    }
    const std::size_t K = config.sim.model.num_regions;
    if (config.format == OutputFormat::Csv) {
        write_csv(config.output_dir / "behavior_in_control.csv", phase_table(config, report.in_control));
        if (config.oc_days > 0) {
            write_csv(config.output_dir / "behavior_out_of_control.csv", phase_table(config, report.out_of_control));
        }
        CsvTable trace;
        trace.header = {"day", "phase"};
        for (std::size_t k = 0; k < K; ++k) trace.header.push_back(region_label(config, k));
        for (std::size_t d = 0; d < report.allocation_trace.size(); ++d) {
            std::vector<std::string> row{std::to_string(d + 1), d < config.ic_days ? "in_control" : "out_of_control"};
            for (Count c : report.allocation_trace[d]) row.push_back(std::to_string(c));
            trace.rows.push_back(std::move(row));
        }
        write_csv(config.output_dir / "allocation_trace.csv", trace);
    } else {
        json doc{{"generator_id", std::string(kGeneratorId)},
                 {"seed", config.sim.base_seed},
                 {"in_control", phase_json(config, report.in_control)},
                 {"allocation_trace", report.allocation_trace}};
        if (config.oc_days > 0) doc["out_of_control"] = phase_json(config, report.out_of_control);
        write_json(config.output_dir / "behavior.json", doc);
    }
}

void cmd_replay(const CliConfig& config, std::ostream& log) {
    if (config.replay_data.empty()) throw ConfigError("replay.data: missing rate matrix path");
    const RateMatrix matrix = load_rate_matrix(config.replay_data);
    if (matrix.num_regions() != config.sim.model.num_regions) {
        throw DataError("rate matrix has " + std::to_string(matrix.num_regions()) + " regions but model.num_regions is " +
                        std::to_string(config.sim.model.num_regions));
    }
    prepare_output(config);
    const ReplayOptions options{config.replay_deterministic};
    const SimulationConfig& sim = config.sim;

    std::vector<ReplayReport> reports(config.replay_seed_count);
    parallel_for(reports.size(), sim.threads, [&](std::size_t i) {
        reports[i] = replay(matrix, sim.model, sim.policy, sim.prior, sim.base_seed + i, options);
    });
    const ReplayReport& first = reports.front();

    auto alarm_json = [&](const ReplayReport& r, std::uint64_t seed) {
        json j{{"seed", seed}, {"alarmed", r.alarmed}, {"days_monitored", r.days_monitored}};
        j["alarm_day"] = r.alarm_day ? json(*r.alarm_day) : json(nullptr);
        j["alarm_date"] = r.alarm_date ? json(*r.alarm_date) : json(nullptr);
        j["region"] = r.alarmed_region ? json(*r.alarmed_region + 1) : json(nullptr);
        j["region_name"] = r.alarmed_region_name ? json(*r.alarmed_region_name) : json(nullptr);
        return j;
    };

    json summary = alarm_json(first, sim.base_seed);
    summary["threshold"] = round_output(sim.model.threshold);
    summary["policy"] = std::string(to_string(sim.policy.kind));
    summary["deterministic"] = config.replay_deterministic;
    summary["generator_id"] = std::string(kGeneratorId);
    if (reports.size() > 1) {
        std::map<std::string, std::size_t> by_region;
        json runs = json::array();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            runs.push_back(alarm_json(reports[i], sim.base_seed + i));
            by_region[reports[i].alarmed_region_name.value_or("<none>")] += 1;
        }
        summary["seeds"] = std::move(runs);
        summary["alarm_region_counts"] = by_region;
    }
    write_json(config.output_dir / "replay_summary.json", summary);

    CsvTable w_trace;
    CsvTable alloc_trace;
    w_trace.header = {"day", "date"};
    w_trace.header.insert(w_trace.header.end(), matrix.region_names.begin(), matrix.region_names.end());
    alloc_trace.header = w_trace.header;
    for (std::size_t d = 0; d < first.days_monitored; ++d) {
        std::vector<std::string> w_row{std::to_string(d + 1), matrix.dates[d]};
        std::vector<std::string> a_row = w_row;
        for (double w : first.cusum_trace[d]) w_row.push_back(format_real(w));
        for (Count c : first.allocation_trace[d]) a_row.push_back(std::to_string(c));
        w_trace.rows.push_back(std::move(w_row));
        alloc_trace.rows.push_back(std::move(a_row));
    }
    write_csv(config.output_dir / "cusum_trace.csv", w_trace);
    write_csv(config.output_dir / "allocation_trace.csv", alloc_trace);
    if (config.verbosity > 0) {
        log << (first.alarmed ? "alarm in " + *first.alarmed_region_name + " on " + *first.alarm_date
                              : std::string("no alarm"))
            << '\n';
    }
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
    if (dynamic_cast<const CalibrationError*>(&error)) return kExitCalibration;
    if (dynamic_cast<const DataError*>(&error)) return kExitData;
    if (dynamic_cast<const DomainError*>(&error) || dynamic_cast<const DimensionError*>(&error)) return kExitConfig;
    return 1;
}

}  // namespace aracusum
