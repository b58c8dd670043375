#include "aracusum/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "aracusum/error.hpp"

namespace aracusum {

SurveillanceLoop::SurveillanceLoop(const ModelParams& model, const PriorConfig& prior,
                                   const AllocatorPolicy& policy)
    : model_(model),
      prior_(prior),
      policy_(policy),
      allocation_(even_allocate(model.num_regions, model.budget)),
      posterior_(posterior_init(prior, model.num_regions)),
      cusum_(CusumState::zeros(model.num_regions)) {
    model_.validate();
    policy_.validate(model_.num_regions, model_.budget);
}

AlarmReport SurveillanceLoop::observe(std::span<const Count> positives) {
    if (positives.size() != model_.num_regions) {
        throw DimensionError("observed " + std::to_string(positives.size()) + " regions, expected " +
                             std::to_string(model_.num_regions));
    }
    const auto tests = std::span<const Count>(allocation_.counts);
    posterior_update_inplace(posterior_.alpha, posterior_.beta, tests, positives, prior_);
    ++posterior_.time;
    cusum_step_inplace(cusum_.stats, tests, positives, model_.in_control_rate,
                       model_.out_of_control_rate);
    ++cusum_.time;
    return check_alarm(cusum_, model_.threshold);
}

void SurveillanceLoop::plan_next() {
    allocation_ = allocate(policy_, cusum_, posterior_, model_.budget);
}

double SurveillanceLoop::max_stat() const {
    return *std::max_element(cusum_.stats.begin(), cusum_.stats.end());
}

void SimulationConfig::validate() const {
    model.validate();
    prior.validate();
    policy.validate(model.num_regions, model.budget);
    if (replications < 1) throw DomainError("replications must be at least 1");
    if (max_steps < 1) throw DomainError("max_steps must be at least 1");
    if (!(target_arl0 > 1.0)) throw DomainError("target_arl0 must exceed 1");
    if (!(arl_tolerance > 0.0)) throw DomainError("arl_tolerance must be positive");
    if (!(h_lo < h_hi)) throw DomainError("calibration bracket needs h_lo < h_hi");
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

namespace {

void draw_positives(std::span<const Count> tests, const ModelParams& model, std::size_t t, Rng& rng,
                    std::vector<Count>& out) {
    out.resize(tests.size());
    for (std::size_t k = 0; k < tests.size(); ++k) {
        out[k] = sample_binomial(rng, tests[k], model.rate_at(k, t));
    }
}

}  // namespace

ObservationBatch sample_observations(const AllocationVector& allocation, const ModelParams& model,
                                     std::size_t t, Rng& rng) {
    if (allocation.size() != model.num_regions) {
        throw DimensionError("allocation length does not match num_regions");
    }
    ObservationBatch batch{t, allocation.counts, {}};
    draw_positives(allocation.counts, model, t, rng, batch.positives);
    return batch;
}

RunOutcome run_once(const SimulationConfig& config, std::uint64_t seed) {
    SurveillanceLoop loop(config.model, config.prior, config.policy);
    Rng rng(seed);
    std::vector<Count> positives;
    RunOutcome out;
    for (std::size_t t = 1; t <= config.max_steps; ++t) {
        draw_positives(loop.allocation().counts, config.model, t, rng, positives);
        if (config.record_allocations) out.allocation_trace.push_back(loop.allocation().counts);
        const AlarmReport alarm = loop.observe(positives);
        if (alarm.fired) {
            out.run_length = t;
            out.alarmed_region = alarm.region;
            return out;
        }
        if (t < config.max_steps) loop.plan_next();
    }
    out.run_length = config.max_steps;
    out.truncated = true;
    return out;
}

MetricsReport summarize(std::span<const RunOutcome> outcomes, const ModelParams& model) {
    MetricsReport report;
    report.replication_count = outcomes.size();
    if (outcomes.empty()) return report;

    double sum = 0.0;
    std::size_t alarmed = 0;
    std::size_t correct = 0;
    for (const auto& o : outcomes) {
        sum += static_cast<double>(o.run_length);
        if (o.truncated) {
            ++report.truncation_count;
        } else {
            ++alarmed;
            if (o.alarmed_region && model.is_hotspot(*o.alarmed_region)) ++correct;
        }
    }
    const double n = static_cast<double>(outcomes.size());
    report.arl = sum / n;
    if (outcomes.size() > 1) {
        double ss = 0.0;
        for (const auto& o : outcomes) {
            const double d = static_cast<double>(o.run_length) - report.arl;
            ss += d * d;
        }
        report.sdrl = std::sqrt(ss / (n - 1.0));
    }
    report.detection_precision =
        alarmed == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(alarmed);
    return report;
}

MetricsReport monte_carlo(const SimulationConfig& config) {
    config.validate();
    std::vector<RunOutcome> outcomes(config.replications);
    parallel_for(config.replications, config.threads, [&](std::size_t i) {
        outcomes[i] = run_once(config, config.base_seed + i);
    });
    return summarize(outcomes, config.model);
}

namespace {

// One calibration replication whose trajectory is extended on demand. The
// trajectory does not depend on the threshold, so the run length for any
// threshold h is the first day the running maximum of max_k W_k exceeds h.
class ResumableRun {
public:
    ResumableRun(const SimulationConfig& config, std::uint64_t seed)
        : loop_(config.model, config.prior, config.policy), rng_(seed) {}

    // Run length at threshold h if known within `horizon` days, else nullopt
    // (the run is extended to at most `horizon` days).
    std::optional<std::size_t> run_length(double h, std::size_t horizon) {
        if (auto known = lookup(h)) return known;
        while (loop_.day() < horizon) {
            step();
            if (running_max_ > h) return loop_.day();
        }
        return std::nullopt;
    }

    std::size_t days() const { return loop_.day(); }

private:
    std::optional<std::size_t> lookup(double h) const {
        // records_ holds strictly increasing running maxima with their days.
        auto it = std::upper_bound(records_.begin(), records_.end(), h,
                                   [](double v, const Record& r) { return v < r.value; });
        if (it == records_.end()) return std::nullopt;
        return it->day;
    }

    void step() {
        if (loop_.day() > 0) loop_.plan_next();
        const std::size_t t = loop_.day() + 1;
        draw_positives(loop_.allocation().counts, loop_.model(), t, rng_, positives_);
        loop_.observe(positives_);
        const double m = loop_.max_stat();
        if (m > running_max_) {
            running_max_ = m;
            records_.push_back({t, m});
        }
    }

    struct Record {
        std::size_t day;
        double value;
    };

    SurveillanceLoop loop_;
    Rng rng_;
    std::vector<Count> positives_;
    double running_max_ = -std::numeric_limits<double>::infinity();
    std::vector<Record> records_;
};

enum class ProbeVerdict { Below, Within, Above };

struct Probe {
    ProbeVerdict verdict;
    std::optional<double> arl;  // exact estimate when every run was resolved
};

class CalibrationSession {
public:
    explicit CalibrationSession(const SimulationConfig& config) : config_(config) {
        runs_.reserve(config.replications);
        for (std::size_t i = 0; i < config.replications; ++i) {
            runs_.emplace_back(config_, config_.base_seed + i);
        }
    }

    // Estimates the ARL at threshold h. Runs are extended in rounds with a
    // doubling horizon; unresolved runs contribute the horizon as a lower
    // bound, which settles "Above" early without simulating very long runs.
    Probe probe(double h, bool exact = false) {
        const double n = static_cast<double>(runs_.size());
        const double upper = config_.target_arl0 + config_.arl_tolerance;
        std::vector<std::optional<std::size_t>> lengths(runs_.size());
        std::size_t horizon = std::min(config_.max_steps,
                                       static_cast<std::size_t>(std::ceil(2.0 * config_.target_arl0)));
        for (;;) {
            parallel_for(runs_.size(), config_.threads, [&](std::size_t i) {
                if (!lengths[i]) lengths[i] = runs_[i].run_length(h, horizon);
            });
            double bound = 0.0;
            bool resolved = true;
            for (const auto& len : lengths) {
                bound += static_cast<double>(len ? *len : horizon);
                resolved = resolved && len.has_value();
            }
            if (resolved || horizon >= config_.max_steps) {
                // At max_steps unresolved runs are truncated, counted as max_steps.
                const double arl = bound / n;
                return {verdict(arl), arl};
            }
            if (!exact && bound / n > upper) return {ProbeVerdict::Above, std::nullopt};
            horizon = std::min(config_.max_steps, horizon * 2);
        }
    }

private:
    ProbeVerdict verdict(double arl) const {
        if (arl < config_.target_arl0 - config_.arl_tolerance) return ProbeVerdict::Below;
        if (arl > config_.target_arl0 + config_.arl_tolerance) return ProbeVerdict::Above;
        return ProbeVerdict::Within;
    }

    const SimulationConfig& config_;
    std::vector<ResumableRun> runs_;
};

}  // namespace

CalibrationResult calibrate_threshold(const SimulationConfig& config) {
    config.validate();
    if (static_cast<double>(config.max_steps) < 10.0 * config.target_arl0) {
        throw DomainError("calibration needs max_steps >= 10 * target_arl0");
    }
    SimulationConfig in_control = config;
    in_control.model.change_time.reset();

    CalibrationSession session(in_control);
    CalibrationResult result;
    double lo = config.h_lo;
    double hi = config.h_hi;
    std::optional<double> arl_lo;
    std::optional<double> arl_hi;

    while (hi - lo >= 1e-3) {
        const double mid = 0.5 * (lo + hi);
        const Probe p = session.probe(mid);
        ++result.probes;
        if (p.verdict == ProbeVerdict::Within) {
            result.threshold = mid;
            result.achieved_arl0 = *p.arl;
            return result;
        }
        if (p.verdict == ProbeVerdict::Below) {
            lo = mid;
            arl_lo = p.arl;
        } else {
            hi = mid;
            arl_hi = p.arl;
        }
    }

    // The estimated ARL is a step function of h (run lengths are integers and
    // statistics may live on a lattice), so the tolerance band can fall inside
    // a jump. Settle on whichever bracket end is closer to the target.
    if (!arl_hi) {
        arl_hi = session.probe(hi, /*exact=*/true).arl;
        ++result.probes;
    }
    if (hi == config.h_hi && *arl_hi < config.target_arl0 - config.arl_tolerance) {
        throw CalibrationError("target ARL0 " + std::to_string(config.target_arl0) + " not reached below h_hi=" +
                               std::to_string(config.h_hi) + " (ARL0 there: " + std::to_string(*arl_hi) + ")");
    }
    if (arl_lo && std::abs(*arl_lo - config.target_arl0) < std::abs(*arl_hi - config.target_arl0)) {
        result.threshold = lo;
        result.achieved_arl0 = *arl_lo;
    } else {
        result.threshold = hi;
        result.achieved_arl0 = *arl_hi;
    }
    return result;
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

PhaseSummary summarize_phase(const std::vector<std::vector<Count>>& trace, std::size_t begin,
                             std::size_t end, std::size_t num_regions) {
    PhaseSummary phase;
    phase.days = end - begin;
    if (phase.days == 0) return phase;
    phase.regions.resize(num_regions);
    std::vector<double> column(phase.days);
    for (std::size_t k = 0; k < num_regions; ++k) {
        RegionSummary& s = phase.regions[k];
        s.min = std::numeric_limits<Count>::max();
        s.max = std::numeric_limits<Count>::min();
        double sum = 0.0;
        for (std::size_t d = begin; d < end; ++d) {
            const Count c = trace[d][k];
            column[d - begin] = static_cast<double>(c);
            sum += static_cast<double>(c);
            s.min = std::min(s.min, c);
            s.max = std::max(s.max, c);
        }
        s.mean = sum / static_cast<double>(phase.days);
        s.median = quantile(column, 0.5);
        s.q25 = quantile(column, 0.25);
        s.q75 = quantile(column, 0.75);
    }
    return phase;
}

}  // namespace

BehaviorReport behavior_study(const SimulationConfig& config, std::size_t ic_days, std::size_t oc_days) {
    config.validate();
    ModelParams model = config.model;
    model.change_time = ic_days;
    // Alarms never stop the study.
    model.threshold = std::numeric_limits<double>::infinity();

    SurveillanceLoop loop(model, config.prior, config.policy);
    Rng rng(config.base_seed);
    std::vector<Count> positives;
    BehaviorReport report;
    const std::size_t total = ic_days + oc_days;
    report.allocation_trace.reserve(total);
    for (std::size_t t = 1; t <= total; ++t) {
        report.allocation_trace.push_back(loop.allocation().counts);
        draw_positives(loop.allocation().counts, model, t, rng, positives);
        loop.observe(positives);
        loop.plan_next();
    }
    report.in_control = summarize_phase(report.allocation_trace, 0, ic_days, model.num_regions);
    report.out_of_control = summarize_phase(report.allocation_trace, ic_days, total, model.num_regions);
    return report;
}

}  // namespace aracusum
