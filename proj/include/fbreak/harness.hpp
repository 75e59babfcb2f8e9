#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fbreak/dgp.hpp"
#include "fbreak/forecasting.hpp"
#include "fbreak/teststats.hpp"
#include "fbreak/timeseries.hpp"

namespace fbreak {

struct StatisticChoice {
    StatisticKind kind = StatisticKind::Qmax;
    VarianceKind variance = VarianceKind::None;

    std::string label() const;  // e.g. "Qmax[nuL]"
    bool operator==(const StatisticChoice&) const = default;
};

struct ExperimentSpec {
    DgpSpec dgp;
    SampleDesign design;
    BlockRule block_rule;
    LossFunction loss;
    std::vector<StatisticChoice> statistics;
    std::vector<double> alphas{0.05};
    std::size_t replications = 5000;
    std::uint64_t base_seed = 20240601;
    std::vector<double> grid;    // power-curve deltas; empty = dgp.delta only
    std::size_t threads = 0;     // 0 = hardware concurrency
    bool intercept = true;
    double max_error_fraction = 0.01;

    void validate() const;
};

struct RateEntry {
    StatisticChoice statistic;
    double alpha = 0.05;
    double delta = 0.0;
    double rejection_rate = 0.0;
    double mc_se = 0.0;
    std::size_t n_reps = 0;
    std::size_t n_errors = 0;
};

struct ExperimentResult {
    std::vector<RateEntry> entries;
    double runtime_seconds = 0.0;

    // throws InvalidArgument when absent
    const RateEntry& at(const StatisticChoice& stat, double alpha, double delta) const;
    double rate(StatisticKind kind, double alpha, double delta = 0.0) const;
};

// Transformed statistics for one replication; NaN marks a statistic that errored.
std::vector<double> replicate(const ExperimentSpec& spec, double delta, std::size_t r);

ExperimentResult run_experiment(const ExperimentSpec& spec);
ExperimentResult power_curve(const ExperimentSpec& spec);

std::size_t resolve_threads(std::size_t requested) noexcept;

// Calls fn(i) for i in [0, count) on up to `threads` workers. The first exception
// thrown by any call is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Long format, one row per statistic x alpha x delta.
void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result);
void write_csv(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result);

inline constexpr int kSummarySchemaVersion = 1;
std::string summary_json(const ExperimentSpec& spec, const ExperimentResult& result);

} // namespace fbreak
