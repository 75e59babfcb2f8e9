#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace fbreak {

enum class Scheme { Fixed, Recursive, Rolling };

std::string_view to_string(Scheme s) noexcept;
Scheme scheme_from_string(std::string_view name);

// Geometry of a pseudo out-of-sample exercise. Observations are indexed
// 1..total_obs; forecast origins run from in_sample to total_obs - horizon.
struct SampleDesign {
    std::size_t total_obs = 0;
    std::size_t in_sample = 0;
    std::size_t out_sample = 0;
    std::size_t horizon = 1;
    Scheme scheme = Scheme::Fixed;
    double sampling_interval = 1.0;
    // when set, losses are evaluated on errors divided by sqrt(h)
    bool continuous_record = false;

    static SampleDesign make(std::size_t total_obs, std::size_t in_sample,
                             std::size_t horizon = 1, Scheme scheme = Scheme::Fixed,
                             double sampling_interval = 1.0, bool continuous_record = false);

    double span() const noexcept { return static_cast<double>(total_obs) * sampling_interval; }
    double in_sample_span() const noexcept { return static_cast<double>(in_sample) * sampling_interval; }
    double psi() const noexcept;
};

enum class VolRegime { LipschitzVol, ItoVol };

std::string_view to_string(VolRegime r) noexcept;
VolRegime regime_from_string(std::string_view name);

struct BlockRule {
    VolRegime regime = VolRegime::LipschitzVol;
    double epsilon = 0.0;
    std::size_t min_blocks = 3;

    void validate() const;
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // half-open
    std::size_t size() const noexcept { return end - begin; }
};

struct BlockPartition {
    std::size_t block_len = 0;   // n_T
    std::size_t n_blocks = 0;    // m_T
    std::size_t out_sample = 0;  // T_n the partition was built for
    std::vector<IndexRange> ranges;
};

std::size_t block_length(std::size_t out_sample, const BlockRule& rule);

// Tiles the first m*n observations with m = floor(T_n / n).
BlockPartition make_partition(std::size_t out_sample, std::size_t block_len,
                              std::size_t min_blocks = 3);

BlockPartition select_block_size(const SampleDesign& design, const BlockRule& rule);
BlockPartition select_block_size(std::size_t out_sample, const BlockRule& rule);

// Centers i (1-based within the out-of-sample). The left window is
// i-n+1..i and the right window i+1..i+n, i.e. 0-based [i-n, i) and [i, i+n).
std::vector<std::size_t> overlapping_windows(const BlockPartition& partition,
                                             std::size_t out_sample);

class LossSeries {
public:
    LossSeries() = default;
    LossSeries(std::vector<double> values, std::vector<double> surprise,
               std::size_t origin_index = 0, std::vector<double> in_sample = {});

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& surprise() const noexcept { return surprise_; }
    std::size_t origin_index() const noexcept { return origin_index_; }
    // fitted-residual losses of the first origin's estimation window (may be empty)
    const std::vector<double>& in_sample() const noexcept { return in_sample_; }
    std::size_t size() const noexcept { return values_.size(); }

    LossSeries scaled(double c) const;

private:
    std::vector<double> values_;
    std::vector<double> surprise_;
    std::size_t origin_index_ = 0;
    std::vector<double> in_sample_;
};

} // namespace fbreak
