#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "aracusum/allocators.hpp"
#include "aracusum/error.hpp"
#include "aracusum/planner.hpp"
#include "aracusum/posterior.hpp"
#include "aracusum/replay.hpp"
#include "aracusum/simulation.hpp"

namespace py = pybind11;
using namespace aracusum;

namespace {

ModelParams make_model(std::size_t num_regions, double p, double q, Count budget, double threshold,
                       std::vector<std::size_t> hotspots, std::optional<std::size_t> change_time) {
    ModelParams m{num_regions, p, q, budget, threshold, std::move(hotspots), change_time};
    m.validate();
    return m;
}

AllocatorPolicy make_policy(const std::string& kind, std::size_t num_batches, std::size_t top_r) {
    return {parse_policy_kind(kind), num_batches, top_r};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive resource allocation CUSUM: core routines";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    m.attr("generator_id") = std::string(kGeneratorId);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init(&make_model), py::arg("num_regions"), py::arg("in_control_rate"),
             py::arg("out_of_control_rate"), py::arg("budget"), py::arg("threshold") = 0.0,
             py::arg("hotspots") = std::vector<std::size_t>{}, py::arg("change_time") = std::nullopt)
        .def_readwrite("num_regions", &ModelParams::num_regions)
        .def_readwrite("in_control_rate", &ModelParams::in_control_rate)
        .def_readwrite("out_of_control_rate", &ModelParams::out_of_control_rate)
        .def_readwrite("budget", &ModelParams::budget)
        .def_readwrite("threshold", &ModelParams::threshold)
        .def_readwrite("hotspots", &ModelParams::hotspots)
        .def_readwrite("change_time", &ModelParams::change_time);

    py::class_<PriorConfig>(m, "PriorConfig")
        .def(py::init([](double a, double b, double decay) {
                 PriorConfig p{a, b, decay};
                 p.validate();
                 return p;
             }),
             py::arg("a"), py::arg("b"), py::arg("decay"))
        .def_readwrite("a", &PriorConfig::a)
        .def_readwrite("b", &PriorConfig::b)
        .def_readwrite("decay", &PriorConfig::decay);

    py::class_<AllocatorPolicy>(m, "AllocatorPolicy")
        .def(py::init(&make_policy), py::arg("kind") = "ara", py::arg("num_batches") = 20, py::arg("top_r") = 20)
        .def_property_readonly("kind", [](const AllocatorPolicy& p) { return std::string(to_string(p.kind)); })
        .def_readwrite("num_batches", &AllocatorPolicy::num_batches)
        .def_readwrite("top_r", &AllocatorPolicy::top_r);

    py::class_<PosteriorState>(m, "PosteriorState")
        .def(py::init<>())
        .def(py::init([](std::vector<double> a, std::vector<double> b, std::size_t t) {
                 return PosteriorState{std::move(a), std::move(b), t};
             }),
             py::arg("alpha"), py::arg("beta"), py::arg("time") = 0)
        .def_readwrite("alpha", &PosteriorState::alpha)
        .def_readwrite("beta", &PosteriorState::beta)
        .def_readwrite("time", &PosteriorState::time);

    m.def("llr_increment", &llr_increment, py::arg("tests"), py::arg("positives"), py::arg("p"), py::arg("q"));
    m.def(
        "cusum_step",
        [](std::vector<double> stats, const std::vector<Count>& tests, const std::vector<Count>& positives,
           double p, double q) {
            if (tests.size() != stats.size() || positives.size() != stats.size())
                throw DimensionError("stats, tests and positives must have equal length");
            for (std::size_t k = 0; k < stats.size(); ++k) llr_increment(tests[k], positives[k], p, q);
            cusum_step_inplace(stats, tests, positives, p, q);
            return stats;
        },
        py::arg("stats"), py::arg("tests"), py::arg("positives"), py::arg("p"), py::arg("q"));
    m.def(
        "check_alarm",
        [](const std::vector<double>& stats, double h) -> std::optional<std::size_t> {
            return check_alarm(std::span<const double>(stats), h).region;
        },
        py::arg("stats"), py::arg("threshold"), "Index of the alarmed region, or None.");

    m.def(
        "posterior_from_history",
        [](const PriorConfig& prior, std::size_t K, const std::vector<std::vector<Count>>& tests,
           const std::vector<std::vector<Count>>& positives) {
            if (tests.size() != positives.size()) throw DimensionError("tests and positives differ in length");
            std::vector<ObservationBatch> history;
            for (std::size_t t = 0; t < tests.size(); ++t) {
                ObservationBatch b{t + 1, tests[t], positives[t]};
                b.validate(K);
                history.push_back(std::move(b));
            }
            return posterior_from_history(prior, K, history);
        },
        py::arg("prior"), py::arg("num_regions"), py::arg("tests"), py::arg("positives"));
    m.def("posterior_init", &posterior_init, py::arg("prior"), py::arg("num_regions"));

    m.def("reward", &reward, py::arg("tests"), py::arg("alpha"), py::arg("beta"));
    m.def("reward_increment", &reward_increment, py::arg("tests"), py::arg("alpha"), py::arg("beta"));
    m.def(
        "greedy_allocate",
        [](const PosteriorState& s, Count budget) { return greedy_allocate(s, budget).counts; },
        py::arg("posterior"), py::arg("budget"));
    m.def(
        "even_allocate", [](std::size_t K, Count budget) { return even_allocate(K, budget).counts; },
        py::arg("num_regions"), py::arg("budget"));
    m.def(
        "topr_allocate",
        [](const std::vector<double>& stats, Count budget, std::size_t batches, std::size_t r) {
            return topr_allocate(stats, budget, batches, r).counts;
        },
        py::arg("stats"), py::arg("budget"), py::arg("num_batches") = 20, py::arg("top_r") = 20);

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init([](const ModelParams& model, const PriorConfig& prior, const AllocatorPolicy& policy,
                         std::size_t replications, std::uint64_t base_seed, std::size_t max_steps,
                         double target_arl0, double arl_tolerance, std::size_t threads) {
                 SimulationConfig c;
                 c.model = model;
                 c.prior = prior;
                 c.policy = policy;
                 c.replications = replications;
                 c.base_seed = base_seed;
                 c.max_steps = max_steps;
                 c.target_arl0 = target_arl0;
                 c.arl_tolerance = arl_tolerance;
                 c.threads = threads;
                 return c;
             }),
             py::arg("model"), py::arg("prior"), py::arg("policy") = AllocatorPolicy::ara(),
             py::arg("replications") = 1000, py::arg("base_seed") = 20200123, py::arg("max_steps") = 4000,
             py::arg("target_arl0") = 200.0, py::arg("arl_tolerance") = 10.0, py::arg("threads") = 0)
        .def_readwrite("model", &SimulationConfig::model)
        .def_readwrite("prior", &SimulationConfig::prior)
        .def_readwrite("policy", &SimulationConfig::policy)
        .def_readwrite("replications", &SimulationConfig::replications)
        .def_readwrite("base_seed", &SimulationConfig::base_seed)
        .def_readwrite("max_steps", &SimulationConfig::max_steps)
        .def_readwrite("threads", &SimulationConfig::threads);

    py::class_<RunOutcome>(m, "RunOutcome")
        .def_readonly("run_length", &RunOutcome::run_length)
        .def_readonly("truncated", &RunOutcome::truncated)
        .def_readonly("alarmed_region", &RunOutcome::alarmed_region);
    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("arl", &MetricsReport::arl)
        .def_readonly("sdrl", &MetricsReport::sdrl)
        .def_readonly("detection_precision", &MetricsReport::detection_precision)
        .def_readonly("replication_count", &MetricsReport::replication_count)
        .def_readonly("truncation_count", &MetricsReport::truncation_count);
    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("threshold", &CalibrationResult::threshold)
        .def_readonly("achieved_arl0", &CalibrationResult::achieved_arl0);

    m.def("run_once", &run_once, py::arg("config"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
    m.def("monte_carlo", &monte_carlo, py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("calibrate_threshold", &calibrate_threshold, py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "behavior_medians",
        [](const SimulationConfig& c, std::size_t ic_days, std::size_t oc_days) {
            const auto r = behavior_study(c, ic_days, oc_days);
            auto medians = [](const PhaseSummary& p) {
                std::vector<double> out;
                for (const auto& reg : p.regions) out.push_back(reg.median);
                return out;
            };
            return py::make_tuple(medians(r.in_control), medians(r.out_of_control));
        },
        py::arg("config"), py::arg("ic_days"), py::arg("oc_days"),
        "Per-region median daily allocations (in control, out of control).");

    py::class_<RateMatrix>(m, "RateMatrix")
        .def_readonly("region_names", &RateMatrix::region_names)
        .def_readonly("dates", &RateMatrix::dates)
        .def_readonly("rates", &RateMatrix::rates);
    m.def("load_rate_matrix", &load_rate_matrix, py::arg("path"));

    py::class_<ReplayReport>(m, "ReplayReport")
        .def_readonly("alarmed", &ReplayReport::alarmed)
        .def_readonly("alarm_day", &ReplayReport::alarm_day)
        .def_readonly("alarm_date", &ReplayReport::alarm_date)
        .def_readonly("alarmed_region", &ReplayReport::alarmed_region)
        .def_readonly("alarmed_region_name", &ReplayReport::alarmed_region_name)
        .def_readonly("days_monitored", &ReplayReport::days_monitored)
        .def_readonly("cusum_trace", &ReplayReport::cusum_trace)
        .def_readonly("allocation_trace", &ReplayReport::allocation_trace);
    m.def(
        "replay",
        [](const RateMatrix& matrix, const ModelParams& model, const AllocatorPolicy& policy,
           const PriorConfig& prior, std::uint64_t seed, bool deterministic) {
            return replay(matrix, model, policy, prior, seed, {deterministic});
        },
        py::arg("matrix"), py::arg("model"), py::arg("policy"), py::arg("prior"), py::arg("seed") = 1,
        py::arg("deterministic") = false);
}
