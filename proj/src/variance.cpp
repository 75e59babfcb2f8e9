#include "fbreak/variance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fbreak/error.hpp"

namespace fbreak {

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;      // divisor n
    double max_abs = 0.0;
};

Moments moments(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    Moments m;
    const auto n = static_cast<double>(end - begin);
    for (std::size_t j = begin; j < end; ++j) {
        m.mean += v[j];
        m.max_abs = std::max(m.max_abs, std::abs(v[j]));
    }
    m.mean /= n;
    for (std::size_t j = begin; j < end; ++j) m.var += (v[j] - m.mean) * (v[j] - m.mean);
    m.var /= n;
    return m;
}

bool vanishes(const Moments& m) { return !(std::sqrt(m.var) > 1e-12 * m.max_abs); }

void check_partition(const LossSeries& series, const BlockPartition& p) {
    if (p.out_sample != series.size() || p.ranges.size() != p.n_blocks)
        throw Error(Errc::InvalidArgument, "partition does not match the loss series");
}

std::vector<double> abs_differences(const BlockSummaries& s) {
    const std::size_t m = s.n_blocks();
    if (m < 3) throw Error(Errc::InvalidBlockCount, "difference-based estimators need m_T >= 3");
    std::vector<double> d(m - 1);
    for (std::size_t b = 1; b < m; ++b) d[b - 1] = std::abs(s.B[b] - s.B[b - 1]);
    return d;
}

double check_positive(double value, const BlockSummaries& s, const char* name) {
    double scale = 0.0;
    for (double b : s.B) scale = std::max(scale, std::abs(b));
    if (!(value > 1e-12 * std::sqrt(static_cast<double>(s.block_len)) * scale))
        throw Error(Errc::ZeroVariance, std::string(name) + ": adjacent block means do not vary");
    return value;
}

} // namespace

std::vector<double> nu_q1(const LossSeries& series, const BlockPartition& partition) {
    check_partition(series, partition);
    if (partition.n_blocks < 2) throw Error(Errc::InvalidBlockCount, "Q1 needs m_T >= 2");
    std::vector<double> out;
    out.reserve(partition.n_blocks);
    for (std::size_t b = 0; b < partition.n_blocks; ++b) {
        const auto m = moments(series.surprise(), partition.ranges[b].begin, partition.ranges[b].end);
        if (vanishes(m))
            throw Error(Errc::ZeroVariance, "surprise losses constant in block " + std::to_string(b));
        out.push_back(std::sqrt(2.0 * m.var));
    }
    return out;
}

std::vector<double> nu_mq1(const LossSeries& series, std::size_t block_len) {
    const std::size_t tn = series.size();
    if (block_len < 1 || tn < 2 * block_len)
        throw Error(Errc::InsufficientSample, "overlapping windows need T_n >= 2 n_T");
    std::vector<double> out;
    out.reserve(tn - 2 * block_len + 1);
    for (std::size_t i = block_len; i + block_len <= tn; ++i) {
        const auto m = moments(series.surprise(), i, i + block_len);
        if (vanishes(m))
            throw Error(Errc::ZeroVariance, "surprise losses constant in window at " + std::to_string(i));
        out.push_back(std::sqrt(2.0 * m.var));
    }
    return out;
}

double nu2(const BlockSummaries& s) {
    const auto d = abs_differences(s);
    double sum = 0.0;
    for (double v : d) sum += v;
    const double n = static_cast<double>(s.block_len);
    const double value = std::sqrt(std::numbers::pi * n) / (2.0 * static_cast<double>(d.size())) * sum;
    return check_positive(value, s, "nu2");
}

double nu3(const BlockSummaries& s) {
    const auto d = abs_differences(s);
    double ss = 0.0;
    for (double v : d) ss += v * v;
    const double n = static_cast<double>(s.block_len);
    const double value = std::sqrt(n) / std::sqrt(2.0 * static_cast<double>(d.size())) * std::sqrt(ss);
    return check_positive(value, s, "nu3");
}

double nu4(const BlockSummaries& s, Nu4Scaling scaling) {
    auto d = abs_differences(s);
    std::sort(d.begin(), d.end());
    const std::size_t k = d.size();
    const double med = k % 2 == 1 ? d[k / 2] : 0.5 * (d[k / 2 - 1] + d[k / 2]);
    const double n = static_cast<double>(s.block_len);
    const double denom = scaling == Nu4Scaling::Consistent ? std::sqrt(2.0) * kNormalQ75
                                                           : std::sqrt(2.0 * kNormalQ75);
    return check_positive(std::sqrt(n) / denom * med, s, "nu4");
}

VarianceEstimate nu_L(const LossSeries& series, const BlockPartition& partition) {
    check_partition(series, partition);
    const std::size_t m = partition.n_blocks;
    if (m < 3) throw Error(Errc::InvalidBlockCount, "self-normalized estimator needs m_T >= 3");
    std::vector<double> A(m), V(m);
    for (std::size_t b = 0; b < m; ++b) {
        const auto mo = moments(series.values(), partition.ranges[b].begin, partition.ranges[b].end);
        if (vanishes(mo))
            throw Error(Errc::ZeroVariance, "losses constant in block " + std::to_string(b));
        A[b] = mo.mean;
        V[b] = mo.var;
    }
    const double n = static_cast<double>(partition.block_len);
    double zz = 0.0;
    for (std::size_t b = 1; b < m; ++b) {
        const double d = A[b] - A[b - 1];
        zz += n * d * d / V[b];
    }
    const double ratio = std::sqrt(zz / (2.0 * static_cast<double>(m - 1)));
    double pooled = 0.0;
    for (double v : V) pooled += v;
    pooled /= static_cast<double>(m);

    VarianceEstimate est;
    est.kind = VarianceKind::NuL;
    est.self_normalized = ratio;
    est.value = ratio * std::sqrt(pooled);
    est.per_block.resize(m);
    for (std::size_t b = 0; b < m; ++b) est.per_block[b] = ratio * std::sqrt(V[b]);
    if (!(ratio > 0.0)) throw Error(Errc::ZeroVariance, "block means of losses do not vary");
    return est;
}

VarianceEstimate estimate_variance(const LossSeries& series, const BlockPartition& partition,
                                   VarianceKind kind) {
    VarianceEstimate est;
    est.kind = kind;
    switch (kind) {
    case VarianceKind::Q1:
        est.per_block = nu_q1(series, partition);
        break;
    case VarianceKind::MQ1:
        est.per_block = nu_mq1(series, partition.block_len);
        break;
    case VarianceKind::Nu2:
        est.value = nu2(block_summaries(series, partition));
        break;
    case VarianceKind::Nu3:
        est.value = nu3(block_summaries(series, partition));
        break;
    case VarianceKind::Nu4:
        est.value = nu4(block_summaries(series, partition));
        break;
    case VarianceKind::NuL:
        return nu_L(series, partition);
    case VarianceKind::None:
        throw Error(Errc::InvalidArgument, "no variance estimator selected");
    }
    return est;
}

} // namespace fbreak
