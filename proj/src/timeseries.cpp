#include "fbreak/timeseries.hpp"

#include <cmath>
#include <string>

#include "fbreak/error.hpp"

namespace fbreak {

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
    case Scheme::Fixed: return "fixed";
    case Scheme::Recursive: return "recursive";
    case Scheme::Rolling: return "rolling";
    }
    return "fixed";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "fixed") return Scheme::Fixed;
    if (name == "recursive") return Scheme::Recursive;
    if (name == "rolling") return Scheme::Rolling;
    throw Error(Errc::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(VolRegime r) noexcept {
    return r == VolRegime::LipschitzVol ? "lipschitz" : "ito";
}

VolRegime regime_from_string(std::string_view name) {
    if (name == "lipschitz") return VolRegime::LipschitzVol;
    if (name == "ito") return VolRegime::ItoVol;
    throw Error(Errc::InvalidArgument, "unknown block rule '" + std::string(name) + "'");
}

SampleDesign SampleDesign::make(std::size_t total_obs, std::size_t in_sample, std::size_t horizon,
                                Scheme scheme, double sampling_interval, bool continuous_record) {
    if (horizon < 1) throw Error(Errc::InvalidArgument, "horizon must be >= 1");
    if (in_sample < 2) throw Error(Errc::InvalidArgument, "in-sample size must be >= 2");
    if (!(sampling_interval > 0.0) || !std::isfinite(sampling_interval))
        throw Error(Errc::InvalidArgument, "sampling interval must be positive");
    if (total_obs + 1 < in_sample + horizon + 2)
        throw Error(Errc::InsufficientSample, "out-of-sample size must be >= 2");
    SampleDesign d;
    d.total_obs = total_obs;
    d.in_sample = in_sample;
    d.horizon = horizon;
    d.out_sample = total_obs - in_sample - horizon + 1;
    d.scheme = scheme;
    d.sampling_interval = sampling_interval;
    d.continuous_record = continuous_record;
    return d;
}

double SampleDesign::psi() const noexcept {
    return continuous_record ? std::sqrt(sampling_interval) : 1.0;
}

void BlockRule::validate() const {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw Error(Errc::InvalidArgument, "epsilon must lie in [0, 0.5)");
    if (min_blocks < 1) throw Error(Errc::InvalidArgument, "min_blocks must be >= 1");
}

std::size_t block_length(std::size_t out_sample, const BlockRule& rule) {
    rule.validate();
    const double expo = (rule.regime == VolRegime::LipschitzVol ? 2.0 / 3.0 : 0.5) - rule.epsilon;
    // guard against pow landing just below an exact integer
    const double raw = std::pow(static_cast<double>(out_sample), expo);
    auto n = static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-12)));
    return n < 1 ? 1 : n;
}

BlockPartition make_partition(std::size_t out_sample, std::size_t block_len,
                              std::size_t min_blocks) {
    if (block_len < 1) throw Error(Errc::InvalidArgument, "block length must be >= 1");
    const std::size_t m = out_sample / block_len;
    if (m < min_blocks)
        throw Error(Errc::InsufficientSample,
                    "T_n=" + std::to_string(out_sample) + " gives " + std::to_string(m) +
                        " blocks of length " + std::to_string(block_len) + ", need " +
                        std::to_string(min_blocks));
    BlockPartition p;
    p.block_len = block_len;
    p.n_blocks = m;
    p.out_sample = out_sample;
    p.ranges.reserve(m);
    for (std::size_t b = 0; b < m; ++b) p.ranges.push_back({b * block_len, (b + 1) * block_len});
    return p;
}

BlockPartition select_block_size(std::size_t out_sample, const BlockRule& rule) {
    return make_partition(out_sample, block_length(out_sample, rule), rule.min_blocks);
}

BlockPartition select_block_size(const SampleDesign& design, const BlockRule& rule) {
    return select_block_size(design.out_sample, rule);
}

std::vector<std::size_t> overlapping_windows(const BlockPartition& partition,
                                             std::size_t out_sample) {
    const std::size_t n = partition.block_len;
    if (n < 1 || out_sample < 2 * n)
        throw Error(Errc::InsufficientSample, "overlapping windows need T_n >= 2 n_T");
    std::vector<std::size_t> centers;
    centers.reserve(out_sample - 2 * n + 1);
    for (std::size_t i = n; i <= out_sample - n; ++i) centers.push_back(i);
    return centers;
}

LossSeries::LossSeries(std::vector<double> values, std::vector<double> surprise,
                       std::size_t origin_index, std::vector<double> in_sample)
    : values_(std::move(values)),
      surprise_(std::move(surprise)),
      origin_index_(origin_index),
      in_sample_(std::move(in_sample)) {
    if (values_.size() != surprise_.size())
        throw Error(Errc::InvalidArgument, "loss and surprise-loss lengths differ");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]) || !std::isfinite(surprise_[i]))
            throw Error(Errc::InvalidArgument, "non-finite loss at index " + std::to_string(i));
    for (double v : in_sample_)
        if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "non-finite in-sample loss");
}

LossSeries LossSeries::scaled(double c) const {
    std::vector<double> v(values_), s(surprise_), in(in_sample_);
    for (auto& x : v) x *= c;
    for (auto& x : s) x *= c;
    for (auto& x : in) x *= c;
    return LossSeries(std::move(v), std::move(s), origin_index_, std::move(in));
}

} // namespace fbreak
