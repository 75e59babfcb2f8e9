#include "fbreak/teststats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "fbreak/error.hpp"
#include "fbreak/forecasting.hpp"
#include "fbreak/variance.hpp"

namespace fbreak {

namespace {

constexpr std::array<std::pair<StatisticKind, std::string_view>, 9> kStatNames{{
    {StatisticKind::Bmax, "Bmax"}, {StatisticKind::MBmax, "MBmax"},
    {StatisticKind::Qmax, "Qmax"}, {StatisticKind::MQmax, "MQmax"},
    {StatisticKind::Gmax, "Gmax"}, {StatisticKind::MGmax, "MGmax"},
    {StatisticKind::QmaxG, "QmaxG"}, {StatisticKind::MQmaxG, "MQmaxG"},
    {StatisticKind::GRt, "GRt"},
}};

constexpr std::array<std::pair<VarianceKind, std::string_view>, 7> kVarNames{{
    {VarianceKind::None, "none"}, {VarianceKind::Q1, "q1"}, {VarianceKind::MQ1, "mq1"},
    {VarianceKind::Nu2, "nu2"}, {VarianceKind::Nu3, "nu3"}, {VarianceKind::Nu4, "nu4"},
    {VarianceKind::NuL, "nuL"},
}};

const double kLogSqrtPi = 0.5 * std::log(std::numbers::pi);

struct Window {
    double sl_mean = 0.0;
    double l_mean = 0.0;
    double l_var = 0.0;
};

Window window(const LossSeries& s, std::size_t begin, std::size_t end) {
    Window w;
    const auto& v = s.values();
    const auto& sl = s.surprise();
    const auto n = static_cast<double>(end - begin);
    for (std::size_t j = begin; j < end; ++j) {
        w.sl_mean += sl[j];
        w.l_mean += v[j];
    }
    w.sl_mean /= n;
    w.l_mean /= n;
    for (std::size_t j = begin; j < end; ++j) w.l_var += (v[j] - w.l_mean) * (v[j] - w.l_mean);
    w.l_var /= n;
    return w;
}

double loss_scale(const LossSeries& s) {
    double m = 0.0;
    for (double v : s.values()) m = std::max(m, std::abs(v));
    return m;
}

double summary_scale(const BlockSummaries& s) {
    double m = 0.0;
    for (std::size_t b = 0; b < s.n_blocks(); ++b)
        m = std::max(m, std::abs(s.Bbar[b]) + std::sqrt(s.D[b]));
    return m;
}

void check_windows(const LossSeries& s, std::size_t n) {
    if (n < 1 || s.size() < 2 * n)
        throw Error(Errc::InsufficientSample, "overlapping windows need T_n >= 2 n_T");
}

void check_summaries(const BlockSummaries& s) {
    if (s.n_blocks() < 2) throw Error(Errc::InvalidBlockCount, "need at least two blocks");
    if (s.Bbar.size() != s.n_blocks() || s.D.size() != s.n_blocks())
        throw Error(Errc::InvalidArgument, "inconsistent block summaries");
}

void check_nu(double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw Error(Errc::NonpositiveVariance, "variance scale must be positive");
}

// Centers i = n..T_n-n; calls f(c, left, right) with c the center ordinal.
template <class F>
void for_each_center(const LossSeries& s, std::size_t n, F&& f) {
    for (std::size_t i = n, c = 0; i + n <= s.size(); ++i, ++c)
        f(c, window(s, i - n, i), window(s, i, i + n));
}

} // namespace

std::string_view to_string(StatisticKind k) noexcept {
    for (const auto& [kind, name] : kStatNames)
        if (kind == k) return name;
    return "?";
}

StatisticKind statistic_from_string(std::string_view name) {
    for (const auto& [kind, n] : kStatNames)
        if (n == name) return kind;
    if (name == "tstat") return StatisticKind::GRt;
    throw Error(Errc::InvalidArgument, "unknown statistic '" + std::string(name) + "'");
}

std::string_view to_string(VarianceKind v) noexcept {
    for (const auto& [kind, name] : kVarNames)
        if (kind == v) return name;
    return "?";
}

VarianceKind variance_from_string(std::string_view name) {
    for (const auto& [kind, n] : kVarNames)
        if (n == name) return kind;
    throw Error(Errc::InvalidArgument, "unknown variance estimator '" + std::string(name) + "'");
}

bool is_overlapping(StatisticKind k) noexcept {
    return k == StatisticKind::MBmax || k == StatisticKind::MQmax || k == StatisticKind::MGmax ||
           k == StatisticKind::MQmaxG;
}

bool needs_variance(StatisticKind k) noexcept {
    return k == StatisticKind::Qmax || k == StatisticKind::MQmax || k == StatisticKind::QmaxG ||
           k == StatisticKind::MQmaxG;
}

BlockSummaries block_summaries(const LossSeries& series, const BlockPartition& partition) {
    if (partition.out_sample != series.size() || partition.ranges.size() != partition.n_blocks)
        throw Error(Errc::InvalidArgument, "partition does not match the loss series");
    BlockSummaries s;
    s.block_len = partition.block_len;
    s.B.reserve(partition.n_blocks);
    s.Bbar.reserve(partition.n_blocks);
    s.D.reserve(partition.n_blocks);
    for (const auto& r : partition.ranges) {
        const auto w = window(series, r.begin, r.end);
        s.B.push_back(w.sl_mean);
        s.Bbar.push_back(w.l_mean);
        s.D.push_back(w.l_var);
    }
    return s;
}

double b_max(const BlockSummaries& s) {
    check_summaries(s);
    const double tol = 1e-12 * summary_scale(s);
    double best = 0.0;
    for (std::size_t b = 0; b + 1 < s.n_blocks(); ++b) {
        if (!(std::abs(s.Bbar[b + 1]) > tol))
            throw Error(Errc::ZeroDenominator, "mean loss vanishes in block " + std::to_string(b + 1));
        best = std::max(best, std::abs((s.B[b + 1] - s.B[b]) / s.Bbar[b + 1]));
    }
    return best;
}

double mb_max(const LossSeries& series, std::size_t n) {
    check_windows(series, n);
    const double tol = 1e-12 * loss_scale(series);
    double best = 0.0;
    for_each_center(series, n, [&](std::size_t c, const Window& l, const Window& r) {
        if (!(std::abs(r.l_mean) > tol))
            throw Error(Errc::ZeroDenominator, "mean loss vanishes in window " + std::to_string(c));
        best = std::max(best, std::abs((l.sl_mean - r.sl_mean) / r.l_mean));
    });
    return best;
}

double q_max(const BlockSummaries& s, double nu) {
    check_summaries(s);
    check_nu(nu);
    double best = 0.0;
    for (std::size_t b = 0; b + 1 < s.n_blocks(); ++b)
        best = std::max(best, std::abs(s.B[b + 1] - s.B[b]));
    return best / nu;
}

double q_max(const BlockSummaries& s, std::span<const double> nu) {
    check_summaries(s);
    if (nu.size() != s.n_blocks())
        throw Error(Errc::InvalidArgument, "one variance scale per block required");
    double best = 0.0;
    for (std::size_t b = 0; b + 1 < s.n_blocks(); ++b) {
        check_nu(nu[b + 1]);
        best = std::max(best, std::abs((s.B[b + 1] - s.B[b]) / nu[b + 1]));
    }
    return best;
}

double mq_max(const LossSeries& series, std::size_t n, double nu) {
    check_windows(series, n);
    check_nu(nu);
    double best = 0.0;
    for_each_center(series, n, [&](std::size_t, const Window& l, const Window& r) {
        best = std::max(best, std::abs(l.sl_mean - r.sl_mean));
    });
    return best / nu;
}

double mq_max(const LossSeries& series, std::size_t n, std::span<const double> nu) {
    check_windows(series, n);
    if (nu.size() != series.size() - 2 * n + 1)
        throw Error(Errc::InvalidArgument, "one variance scale per window required");
    double best = 0.0;
    for_each_center(series, n, [&](std::size_t c, const Window& l, const Window& r) {
        check_nu(nu[c]);
        best = std::max(best, std::abs((l.sl_mean - r.sl_mean) / nu[c]));
    });
    return best;
}

double g_max(const BlockSummaries& s) {
    check_summaries(s);
    const double tol = 1e-12 * summary_scale(s);
    double best = 0.0;
    for (std::size_t b = 0; b + 1 < s.n_blocks(); ++b) {
        const double sd = std::sqrt(s.D[b + 1]);
        if (!(sd > tol))
            throw Error(Errc::ZeroWithinBlockVariance,
                        "losses constant in block " + std::to_string(b + 1));
        best = std::max(best, std::abs((s.B[b + 1] - s.B[b]) / sd));
    }
    return best;
}

double mg_max(const LossSeries& series, std::size_t n) {
    check_windows(series, n);
    const double tol = 1e-12 * loss_scale(series);
    double best = 0.0;
    for_each_center(series, n, [&](std::size_t c, const Window& l, const Window& r) {
        const double sd = std::sqrt(r.l_var);
        if (!(sd > tol))
            throw Error(Errc::ZeroWithinBlockVariance,
                        "losses constant in window " + std::to_string(c));
        best = std::max(best, std::abs((l.sl_mean - r.sl_mean) / sd));
    });
    return best;
}

double gamma_m(std::size_t m) {
    if (m < 3) throw Error(Errc::InvalidBlockCount, "m_T must be >= 3, got " + std::to_string(m));
    const double lm = std::log(static_cast<double>(m));
    return std::sqrt(4.0 * lm - 2.0 * std::log(lm));
}

double transform_nonoverlapping(double raw, std::size_t n, std::size_t m, StatisticKind kind) {
    const double g = gamma_m(m);
    const double sl = std::sqrt(std::log(static_cast<double>(m)));
    const double rn = std::sqrt(static_cast<double>(n));
    switch (kind) {
    case StatisticKind::Bmax: return sl * (std::numbers::sqrt2 / 2.0 * rn * raw - g);
    case StatisticKind::Qmax:
    case StatisticKind::QmaxG: return sl * (rn * raw - g);
    case StatisticKind::Gmax: return std::numbers::sqrt2 / 2.0 * sl * (rn * raw - g);
    default:
        throw Error(Errc::InvalidArgument,
                    std::string(to_string(kind)) + " is not a non-overlapping statistic");
    }
}

double transform_overlapping(double raw, std::size_t n, std::size_t m, StatisticKind kind) {
    gamma_m(m);
    const double lm = std::log(static_cast<double>(m));
    const double base = std::sqrt(lm) * std::sqrt(static_cast<double>(n));
    double factor = 0.0;
    switch (kind) {
    case StatisticKind::MBmax:
    case StatisticKind::MGmax: factor = std::numbers::sqrt2 / 2.0 * base; break;
    case StatisticKind::MQmax:
    case StatisticKind::MQmaxG: factor = base; break;
    default:
        throw Error(Errc::InvalidArgument,
                    std::string(to_string(kind)) + " is not an overlapping statistic");
    }
    return factor * raw - 2.0 * lm - 0.5 * std::log(lm) - std::log(3.0);
}

double cdf_V(double v) {
    if (std::isnan(v)) throw Error(Errc::DomainError, "cdf_V of NaN");
    return std::exp(-std::exp(-v - kLogSqrtPi));
}

double quantile_V(double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(Errc::DomainError, "quantile level must lie in (0,1)");
    return -kLogSqrtPi - std::log(-std::log(q));
}

double critical_value(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0,1)");
    return quantile_V(1.0 - alpha);
}

namespace {

double normal_critical(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0,1)");
    static const boost::math::normal_distribution<double> z;
    return boost::math::quantile(boost::math::complement(z, alpha / 2.0));
}

} // namespace

bool rejects(StatisticKind kind, double transformed, double alpha) {
    const double cv = kind == StatisticKind::GRt ? normal_critical(alpha) : critical_value(alpha);
    return transformed > cv;
}

double transformed_statistic(const LossSeries& series, const BlockPartition& partition,
                             StatisticKind kind, VarianceKind variance, VarianceKind* used,
                             double* raw_out, std::optional<double>* nu_out,
                             const SampleDesign* design) {
    const std::size_t n = partition.block_len;
    const std::size_t m = partition.n_blocks;
    if (partition.out_sample != series.size())
        throw Error(Errc::InvalidArgument, "partition does not match the loss series");
    double raw = 0.0;
    double out = 0.0;
    VarianceKind var_used = VarianceKind::None;
    std::optional<double> nu_value;

    if (needs_variance(kind)) {
        var_used = variance == VarianceKind::None ? VarianceKind::NuL : variance;
        if (is_overlapping(kind) && var_used == VarianceKind::Q1) var_used = VarianceKind::MQ1;
        if (!is_overlapping(kind) && var_used == VarianceKind::MQ1) var_used = VarianceKind::Q1;
    }

    switch (kind) {
    case StatisticKind::GRt:
        raw = design ? gr_tstat(series, *design)
                     : gr_tstat(std::span<const double>(series.surprise()));
        out = std::abs(raw);
        break;
    case StatisticKind::Bmax:
        raw = b_max(block_summaries(series, partition));
        out = transform_nonoverlapping(raw, n, m, kind);
        break;
    case StatisticKind::Gmax:
        raw = g_max(block_summaries(series, partition));
        out = transform_nonoverlapping(raw, n, m, kind);
        break;
    case StatisticKind::MBmax:
        raw = mb_max(series, n);
        out = transform_overlapping(raw, n, m, kind);
        break;
    case StatisticKind::MGmax:
        raw = mg_max(series, n);
        out = transform_overlapping(raw, n, m, kind);
        break;
    case StatisticKind::Qmax:
    case StatisticKind::QmaxG: {
        const auto s = block_summaries(series, partition);
        const auto est = estimate_variance(series, partition, var_used);
        if (var_used == VarianceKind::Q1) {
            raw = q_max(s, std::span<const double>(est.per_block));
        } else {
            raw = q_max(s, est.value);
            nu_value = est.value;
        }
        out = transform_nonoverlapping(raw, n, m, kind);
        break;
    }
    case StatisticKind::MQmax:
    case StatisticKind::MQmaxG: {
        const auto est = estimate_variance(series, partition, var_used);
        if (var_used == VarianceKind::MQ1) {
            raw = mq_max(series, n, std::span<const double>(est.per_block));
        } else {
            raw = mq_max(series, n, est.value);
            nu_value = est.value;
        }
        out = transform_overlapping(raw, n, m, kind);
        break;
    }
    }
    if (used) *used = var_used;
    if (raw_out) *raw_out = raw;
    if (nu_out) *nu_out = nu_value;
    return out;
}

TestReport run_test(const LossSeries& series, const BlockPartition& partition, StatisticKind kind,
                    VarianceKind variance, double alpha, const SampleDesign* design) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0,1)");
    TestReport r;
    r.statistic_kind = kind;
    r.alpha = alpha;
    r.n_T = partition.block_len;
    r.m_T = partition.n_blocks;
    r.transformed = transformed_statistic(series, partition, kind, variance,
                                          &r.variance_estimator_used, &r.raw, &r.variance_value,
                                          design);
    if (kind == StatisticKind::GRt) {
        static const boost::math::normal_distribution<double> z;
        r.critical_value = normal_critical(alpha);
        r.p_value = 2.0 * boost::math::cdf(boost::math::complement(z, r.transformed));
    } else {
        r.critical_value = critical_value(alpha);
        r.p_value = 1.0 - cdf_V(r.transformed);
    }
    r.reject = r.transformed > r.critical_value;
    return r;
}

} // namespace fbreak
