#pragma once

#include <cstddef>
#include <vector>

#include "fbreak/teststats.hpp"
#include "fbreak/timeseries.hpp"

namespace fbreak {

inline constexpr double kNormalQ75 = 0.6744897501960817;

enum class Nu4Scaling {
    Consistent,  // sqrt(n) / (sqrt(2) * Phi_0.75) * median|dB|
    AsTypeset,   // sqrt(n) / sqrt(2 * Phi_0.75) * median|dB|
};

struct VarianceEstimate {
    VarianceKind kind = VarianceKind::None;
    double value = 0.0;               // standard-deviation scale
    std::vector<double> per_block;    // Q1 / MQ1 / NuL local scale
    double self_normalized = 0.0;     // NuL only: the unit-free ratio
};

std::vector<double> nu_q1(const LossSeries& series, const BlockPartition& partition);
std::vector<double> nu_mq1(const LossSeries& series, std::size_t block_len);

double nu2(const BlockSummaries& s);
double nu3(const BlockSummaries& s);
double nu4(const BlockSummaries& s, Nu4Scaling scaling = Nu4Scaling::Consistent);

// Block self-normalized estimate. self_normalized is
// sqrt(sum_b zeta_b^2 / (2(m-1))) with zeta_b = sqrt(n)(A_b - A_{b-1}) / sqrt(V_b);
// value = self_normalized * sqrt(mean_b V_b) and per_block[b] = self_normalized * sqrt(V_b).
VarianceEstimate nu_L(const LossSeries& series, const BlockPartition& partition);

VarianceEstimate estimate_variance(const LossSeries& series, const BlockPartition& partition,
                                   VarianceKind kind);

} // namespace fbreak
