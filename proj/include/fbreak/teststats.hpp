#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fbreak/timeseries.hpp"

namespace fbreak {

enum class StatisticKind { Bmax, MBmax, Qmax, MQmax, Gmax, MGmax, QmaxG, MQmaxG, GRt };

// Which dispersion estimate studentizes a Q-type statistic.
enum class VarianceKind { None, Q1, MQ1, Nu2, Nu3, Nu4, NuL };

std::string_view to_string(StatisticKind k) noexcept;
StatisticKind statistic_from_string(std::string_view name);
std::string_view to_string(VarianceKind v) noexcept;
VarianceKind variance_from_string(std::string_view name);

bool is_overlapping(StatisticKind k) noexcept;
bool needs_variance(StatisticKind k) noexcept;

struct BlockSummaries {
    std::vector<double> B;     // block means of surprise losses
    std::vector<double> Bbar;  // block means of raw losses
    std::vector<double> D;     // within-block variance of raw losses (divisor n)
    std::size_t block_len = 0;

    std::size_t n_blocks() const noexcept { return B.size(); }
};

BlockSummaries block_summaries(const LossSeries& series, const BlockPartition& partition);

double b_max(const BlockSummaries& s);
double mb_max(const LossSeries& series, std::size_t block_len);
double q_max(const BlockSummaries& s, double nu);
// nu[b] studentizes the difference ending in block b (entries 1..m-1 are used)
double q_max(const BlockSummaries& s, std::span<const double> per_block_nu);
double mq_max(const LossSeries& series, std::size_t block_len, double nu);
// nu[c] studentizes the c-th center returned by overlapping_windows
double mq_max(const LossSeries& series, std::size_t block_len, std::span<const double> per_window_nu);
double g_max(const BlockSummaries& s);
double mg_max(const LossSeries& series, std::size_t block_len);

double gamma_m(std::size_t m);
double transform_nonoverlapping(double raw, std::size_t n, std::size_t m, StatisticKind kind);
double transform_overlapping(double raw, std::size_t n, std::size_t m, StatisticKind kind);

double cdf_V(double v);
double quantile_V(double q);
double critical_value(double alpha);

struct TestReport {
    StatisticKind statistic_kind = StatisticKind::Qmax;
    double raw = 0.0;
    double transformed = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    VarianceKind variance_estimator_used = VarianceKind::None;
    std::optional<double> variance_value;
    double alpha = 0.05;
    std::size_t n_T = 0;
    std::size_t m_T = 0;
};

// Qmax-type kinds with VarianceKind::None fall back to NuL; Q1 maps to MQ1
// for overlapping kinds.
TestReport run_test(const LossSeries& series, const BlockPartition& partition, StatisticKind kind,
                    VarianceKind variance, double alpha,
                    const SampleDesign* design = nullptr);

// Transformed statistic only (the value compared against the critical value);
// for GRt this is |t|, using the scheme-aware variance when a design is given.
double transformed_statistic(const LossSeries& series, const BlockPartition& partition,
                             StatisticKind kind, VarianceKind variance,
                             VarianceKind* used = nullptr, double* raw = nullptr,
                             std::optional<double>* nu = nullptr,
                             const SampleDesign* design = nullptr);

bool rejects(StatisticKind kind, double transformed, double alpha);

} // namespace fbreak
