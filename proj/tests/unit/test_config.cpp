#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "aracusum/commands.hpp"
#include "aracusum/config.hpp"
#include "aracusum/error.hpp"
#include "aracusum/report_io.hpp"

using namespace aracusum;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_doc() {
    return json::parse(R"({
      "model": {"num_regions": 4, "in_control_rate": 0.01, "out_of_control_rate": [0.03, 0.05],
                "budget": 400, "threshold": 3.0, "hotspots": [1]},
      "prior": {"a": 2.0, "mean": 0.01, "decay": 0.3},
      "policy": {"kind": ["ara", "even"]},
      "simulation": {"replications": 20, "base_seed": 5, "target_arl0": 50, "threads": 1}
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("aracusum_unit_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing and sweep") {
    auto cfg = parse_config(base_doc());
    CHECK(cfg.sim.model.num_regions == 4);
    CHECK(cfg.sim.model.hotspots == std::vector<std::size_t>{0});
    CHECK(cfg.sim.model.change_time == std::optional<std::size_t>{0});
    CHECK(cfg.threshold_mode == ThresholdMode::Fixed);
    auto points = cfg.sweep();
    REQUIRE(points.size() == 4);
    CHECK(points[0].policy.kind == PolicyKind::Ara);
    CHECK(points[0].q == 0.03);
    CHECK(points[1].q == 0.05);
    CHECK(points[2].policy.kind == PolicyKind::Even);
    CHECK(points[0].b == doctest::Approx(198.0));
    auto sim = cfg.at(points[3]);
    CHECK(sim.model.out_of_control_rate == 0.05);
    CHECK(sim.policy.kind == PolicyKind::Even);
    CHECK(sim.prior.b == doctest::Approx(198.0));
}

TEST_CASE("config errors name the field") {
    auto doc = base_doc();
    doc["policy"].erase("kind");
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("policy.kind") != std::string::npos);
    }
    doc = base_doc();
    doc["simulation"]["target_arl0"] = 1;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = base_doc();
    doc["model"]["hotspots"] = json::array({0});
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = base_doc();
    doc["bogus"] = json::object();
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = base_doc();
    doc["policy"]["kind"] = "random";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("dotted overrides") {
    auto doc = base_doc();
    apply_override(doc, "prior.decay=0.6");
    apply_override(doc, "policy.kind=topr");
    apply_override(doc, "policy.top_r=2");
    apply_override(doc, "policy.num_batches=4");
    apply_override(doc, "model.threshold=auto");
    CHECK(doc["prior"]["decay"] == 0.6);
    CHECK(doc["policy"]["kind"] == "topr");
    CHECK(parse_config(doc).threshold_mode == ThresholdMode::Auto);
    CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
}

TEST_CASE("csv round trip and number formatting") {
    auto dir = scratch("csv");
    fs::create_directories(dir);
    CsvTable t{{"a", "b"}, {{"1", format_real(0.1 + 0.2)}, {"x", format_real(1.0 / 3.0)}}};
    write_csv(dir / "t.csv", t);
    auto back = read_csv(dir / "t.csv");
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(format_real(0.1 + 0.2) == "0.3");
    CHECK(round_output(1.0 / 3.0) == 0.333333333333);
    fs::remove_all(dir);
}

TEST_CASE("commands write identical files for any thread count") {
    auto doc = base_doc();
    auto run = [&](std::size_t threads, const std::string& tag) {
        auto d = doc;
        d["simulation"]["threads"] = threads;
        auto dir = scratch(tag);
        d["output"]["dir"] = dir.string();
        std::ostringstream log;
        cmd_simulate(parse_config(d), log);
        return slurp(dir / "metrics.csv");
    };
    const auto a = run(1, "t1");
    const auto b = run(3, "t3");
    CHECK_FALSE(a.empty());
    CHECK(a == b);
    CHECK(a.rfind("policy,q,", 0) == 0);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
    CHECK(exit_code_for(CalibrationError("x")) == kExitCalibration);
    CHECK(exit_code_for(DataError("x")) == kExitData);
}
