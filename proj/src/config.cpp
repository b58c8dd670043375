#include "aracusum/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aracusum/error.hpp"

namespace aracusum {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

const json* find(const json& doc, const std::string& section, const std::string& key) {
    if (!doc.contains(section)) return nullptr;
    const json& s = doc.at(section);
    if (!s.is_object()) fail(section, "expected an object");
    if (!s.contains(key) || s.at(key).is_null()) return nullptr;
    return &s.at(key);
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number, got " + v.dump());
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

std::uint64_t get_unsigned(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) fail(path, "must be nonnegative");
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    fail(path, "expected a nonnegative integer, got " + v.dump());
}

std::vector<double> get_number_list(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_array()) {
        if (v.empty()) fail(path, "list must not be empty");
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
        }
    } else {
        out.push_back(get_number(v, path));
    }
    return out;
}

template <class T>
T value_or(const json& doc, const std::string& section, const std::string& key, T fallback) {
    const json* v = find(doc, section, key);
    if (!v) return fallback;
    const std::string path = section + "." + key;
    if constexpr (std::is_same_v<T, double>) {
        return get_number(*v, path);
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) fail(path, "expected true or false");
        return v->get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) fail(path, "expected a string");
        return v->get<std::string>();
    } else {
        return static_cast<T>(get_unsigned(*v, path));
    }
}

const json& required(const json& doc, const std::string& section, const std::string& key) {
    const json* v = find(doc, section, key);
    if (!v) fail(section + "." + key, "missing required field");
    return *v;
}

void check_sections(const json& doc) {
    static const std::vector<std::string> known = {"model",  "prior",   "policy",  "simulation",
                                                   "behavior", "replay", "regions", "output"};
    if (!doc.is_object()) fail("<root>", "config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown section");
    }
}

}  // namespace

json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set " + assignment + ": expected key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::string pointer;
    std::istringstream parts(key);
    std::string part;
    while (std::getline(parts, part, '.')) {
        if (part.empty()) throw ConfigError("--set " + assignment + ": empty path component");
        pointer += "/" + part;
    }
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    doc[json::json_pointer(pointer)] = value;
}

CliConfig parse_config(const json& doc) {
    check_sections(doc);
    CliConfig cfg;
    SimulationConfig& sim = cfg.sim;

    // policy
    {
        const json& kind = required(doc, "policy", "kind");
        std::vector<std::string> names;
        if (kind.is_array()) {
            if (kind.empty()) fail("policy.kind", "list must not be empty");
            for (const auto& k : kind) {
                if (!k.is_string()) fail("policy.kind", "expected policy names");
                names.push_back(k.get<std::string>());
            }
        } else if (kind.is_string()) {
            names.push_back(kind.get<std::string>());
        } else {
            fail("policy.kind", "expected a policy name or a list of names");
        }
        const auto batches = value_or<std::size_t>(doc, "policy", "num_batches", 20);
        const auto top_r = value_or<std::size_t>(doc, "policy", "top_r", 20);
        for (const auto& name : names) {
            try {
                cfg.policies.push_back({parse_policy_kind(name), batches, top_r});
            } catch (const ConfigError& e) {
                fail("policy.kind", e.what());
            }
        }
    }

    // model
    {
        ModelParams& m = sim.model;
        m.num_regions = static_cast<std::size_t>(get_unsigned(required(doc, "model", "num_regions"), "model.num_regions"));
        if (m.num_regions == 0) fail("model.num_regions", "must be positive");
        m.in_control_rate = get_number(required(doc, "model", "in_control_rate"), "model.in_control_rate");
        cfg.q_values = get_number_list(required(doc, "model", "out_of_control_rate"), "model.out_of_control_rate");
        m.out_of_control_rate = cfg.q_values.front();
        const auto budget = get_unsigned(required(doc, "model", "budget"), "model.budget");
        if (budget < 1) fail("model.budget", "must be at least 1");
        m.budget = static_cast<Count>(budget);

        if (const json* h = find(doc, "model", "threshold")) {
            if (h->is_string() && h->get<std::string>() == "auto") {
                cfg.threshold_mode = ThresholdMode::Auto;
            } else {
                m.threshold = get_number(*h, "model.threshold");
            }
        }
        if (const json* f = find(doc, "model", "threshold_file")) {
            if (!f->is_string()) fail("model.threshold_file", "expected a path");
            if (cfg.threshold_mode == ThresholdMode::Auto) {
                fail("model.threshold_file", "conflicts with model.threshold = \"auto\"");
            }
            cfg.threshold_mode = ThresholdMode::File;
            cfg.threshold_file = f->get<std::string>();
        }

        if (const json* hs = find(doc, "model", "hotspots")) {
            if (!hs->is_array()) fail("model.hotspots", "expected a list of 1-based region numbers");
            for (std::size_t i = 0; i < hs->size(); ++i) {
                const std::string path = "model.hotspots[" + std::to_string(i) + "]";
                const auto r = get_unsigned((*hs)[i], path);
                if (r < 1 || r > m.num_regions) {
                    fail(path, "region " + std::to_string(r) + " outside 1.." + std::to_string(m.num_regions));
                }
                m.hotspots.push_back(static_cast<std::size_t>(r - 1));
            }
        }
        m.change_time = 0;
        if (const json* ct = find(doc, "model", "change_time")) {
            if (ct->is_string() && ct->get<std::string>() == "never") {
                m.change_time.reset();
            } else {
                m.change_time = static_cast<std::size_t>(get_unsigned(*ct, "model.change_time"));
            }
        }
        for (double q : cfg.q_values) {
            ModelParams probe = m;
            probe.out_of_control_rate = q;
            try {
                probe.validate();
            } catch (const DomainError& e) {
                fail("model", e.what());
            }
        }
    }

    // prior
    {
        cfg.a_values = get_number_list(required(doc, "prior", "a"), "prior.a");
        cfg.decay_values = get_number_list(required(doc, "prior", "decay"), "prior.decay");
        const json* b = find(doc, "prior", "b");
        const json* mean = find(doc, "prior", "mean");
        if (b && mean) fail("prior.b", "give either prior.b or prior.mean, not both");
        if (!b && !mean) fail("prior.b", "missing required field (or give prior.mean)");
        if (b) cfg.prior_b = get_number(*b, "prior.b");
        if (mean) {
            cfg.prior_mean = get_number(*mean, "prior.mean");
            if (!(*cfg.prior_mean > 0.0 && *cfg.prior_mean < 1.0)) fail("prior.mean", "must lie in (0,1)");
        }
        for (double a : cfg.a_values) {
            if (!(a > 0.0)) fail("prior.a", "must be positive");
        }
        if (cfg.prior_b && !(*cfg.prior_b > 0.0)) fail("prior.b", "must be positive");
        for (double w : cfg.decay_values) {
            if (!(w > 0.0 && w <= 1.0)) fail("prior.decay", "must lie in (0,1]");
        }
        sim.prior.a = cfg.a_values.front();
        sim.prior.decay = cfg.decay_values.front();
        sim.prior.b = cfg.prior_b ? *cfg.prior_b : sim.prior.a * (1.0 - *cfg.prior_mean) / *cfg.prior_mean;
    }

    // simulation
    {
        sim.replications = value_or<std::size_t>(doc, "simulation", "replications", 1000);
        if (sim.replications < 1) fail("simulation.replications", "must be at least 1");
        sim.base_seed = value_or<std::uint64_t>(doc, "simulation", "base_seed", sim.base_seed);
        sim.target_arl0 = value_or<double>(doc, "simulation", "target_arl0", 200.0);
        if (!(sim.target_arl0 > 1.0)) {
            fail("simulation.target_arl0", "must exceed 1 (in-control runs cannot alarm before day 1)");
        }
        sim.arl_tolerance = value_or<double>(doc, "simulation", "arl_tolerance", 10.0);
        if (!(sim.arl_tolerance > 0.0)) fail("simulation.arl_tolerance", "must be positive");
        const auto default_steps = static_cast<std::size_t>(std::ceil(20.0 * sim.target_arl0));
        sim.max_steps = value_or<std::size_t>(doc, "simulation", "max_steps", default_steps);
        if (sim.max_steps < 1) fail("simulation.max_steps", "must be at least 1");
        sim.h_lo = value_or<double>(doc, "simulation", "h_lo", 0.0);
        sim.h_hi = value_or<double>(doc, "simulation", "h_hi", 30.0);
        if (!(sim.h_lo < sim.h_hi)) fail("simulation.h_hi", "must exceed simulation.h_lo");
        sim.threads = value_or<std::size_t>(doc, "simulation", "threads", 0);
    }

    for (const auto& policy : cfg.policies) {
        try {
            policy.validate(sim.model.num_regions, sim.model.budget);
        } catch (const DomainError& e) {
            fail("policy", e.what());
        }
    }
    sim.policy = cfg.policies.front();

    // behavior
    cfg.ic_days = value_or<std::size_t>(doc, "behavior", "ic_days", 500);
    cfg.oc_days = value_or<std::size_t>(doc, "behavior", "oc_days", 500);

    // replay
    if (const json* data = find(doc, "replay", "data")) {
        if (!data->is_string()) fail("replay.data", "expected a path");
        cfg.replay_data = data->get<std::string>();
    }
    cfg.replay_deterministic = value_or<bool>(doc, "replay", "deterministic", false);
    cfg.replay_seed_count = value_or<std::size_t>(doc, "replay", "seed_count", 1);
    if (cfg.replay_seed_count < 1) fail("replay.seed_count", "must be at least 1");

    // regions
    if (const json* names = find(doc, "regions", "names")) {
        if (!names->is_array()) fail("regions.names", "expected a list of strings");
        for (const auto& n : *names) {
            if (!n.is_string()) fail("regions.names", "expected a list of strings");
            cfg.region_names.push_back(n.get<std::string>());
        }
        if (cfg.region_names.size() != sim.model.num_regions) {
            fail("regions.names", "has " + std::to_string(cfg.region_names.size()) + " entries, expected " +
                                      std::to_string(sim.model.num_regions));
        }
    }

    // output
    cfg.output_dir = value_or<std::string>(doc, "output", "dir", ".");
    const std::string format = value_or<std::string>(doc, "output", "format", "csv");
    if (format == "csv") {
        cfg.format = OutputFormat::Csv;
    } else if (format == "json") {
        cfg.format = OutputFormat::Json;
    } else {
        fail("output.format", "expected csv or json, got '" + format + "'");
    }
    cfg.verbosity = static_cast<int>(value_or<std::size_t>(doc, "output", "verbosity", 0));

    try {
        sim.validate();
    } catch (const DomainError& e) {
        fail("simulation", e.what());
    }
    return cfg;
}

std::vector<SweepPoint> CliConfig::sweep() const {
    std::vector<SweepPoint> points;
    for (const auto& policy : policies) {
        for (double w : decay_values) {
            for (double a : a_values) {
                const double b = prior_b ? *prior_b : a * (1.0 - *prior_mean) / *prior_mean;
                for (double q : q_values) points.push_back({policy, q, w, a, b});
            }
        }
    }
    return points;
}

SimulationConfig CliConfig::at(const SweepPoint& point) const {
    SimulationConfig out = sim;
    out.policy = point.policy;
    out.model.out_of_control_rate = point.q;
    out.prior = {point.a, point.b, point.decay};
    return out;
}

}  // namespace aracusum
