#include "fbreak/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

#include "fbreak/error.hpp"
#include "fbreak/rng.hpp"

namespace fbreak {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string p_column(const DgpSpec& d) {
    if (d.duration) return std::to_string(*d.duration);
    if (d.family == Family::P3 || d.family == Family::P5) return std::to_string(d.switch_period);
    return "inf";
}

std::vector<double> deltas_of(const ExperimentSpec& spec) {
    return spec.grid.empty() ? std::vector<double>{spec.dgp.delta} : spec.grid;
}

} // namespace

std::string StatisticChoice::label() const {
    std::string s(to_string(kind));
    if (needs_variance(kind)) {
        s += '[';
        s += to_string(variance == VarianceKind::None ? VarianceKind::NuL : variance);
        s += ']';
    }
    return s;
}

void ExperimentSpec::validate() const {
    dgp.validate();
    block_rule.validate();
    loss.validate();
    if (replications < 100) throw Error(Errc::InvalidArgument, "replications must be at least 100");
    if (alphas.empty()) throw Error(Errc::InvalidArgument, "at least one alpha is required");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0,1)");
    if (statistics.empty()) throw Error(Errc::InvalidArgument, "at least one statistic is required");
    for (double d : grid)
        if (!std::isfinite(d)) throw Error(Errc::InvalidArgument, "delta grid must be finite");
    if (!(max_error_fraction >= 0.0 && max_error_fraction < 1.0))
        throw Error(Errc::InvalidArgument, "max_error_fraction must lie in [0,1)");
    SampleDesign::make(design.total_obs, design.in_sample, design.horizon, design.scheme,
                       design.sampling_interval, design.continuous_record);
    select_block_size(design, block_rule);
}

const RateEntry& ExperimentResult::at(const StatisticChoice& stat, double alpha, double delta) const {
    for (const auto& e : entries)
        if (e.statistic == stat && e.alpha == alpha && e.delta == delta) return e;
    throw Error(Errc::InvalidArgument, "no result for " + stat.label());
}

double ExperimentResult::rate(StatisticKind kind, double alpha, double delta) const {
    for (const auto& e : entries)
        if (e.statistic.kind == kind && e.alpha == alpha && e.delta == delta) return e.rejection_rate;
    throw Error(Errc::InvalidArgument, "no result for " + std::string(to_string(kind)));
}

std::size_t resolve_threads(std::size_t requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::vector<double> replicate(const ExperimentSpec& spec, double delta, std::size_t r) {
    const std::size_t k = spec.statistics.size();
    std::vector<double> out(k, std::numeric_limits<double>::quiet_NaN());
    DgpSpec d = spec.dgp;
    d.delta = delta;
    d.seed = derive_seed(spec.base_seed, r);
    LossSeries losses;
    BlockPartition partition;
    try {
        const auto path = simulate(d, spec.design.total_obs);
        losses = forecast_losses(path, spec.design, spec.loss, spec.intercept);
        partition = select_block_size(spec.design, spec.block_rule);
    } catch (const Error&) {
        return out;
    }
    for (std::size_t s = 0; s < k; ++s) {
        const auto& stat = spec.statistics[s];
        try {
            out[s] = transformed_statistic(losses, partition, stat.kind, stat.variance, nullptr,
                                           nullptr, nullptr, &spec.design);
        } catch (const Error&) {
        }
    }
    return out;
}

ExperimentResult power_curve(const ExperimentSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto deltas = deltas_of(spec);
    const std::size_t R = spec.replications;
    const std::size_t k = spec.statistics.size();
    const auto limit = static_cast<std::size_t>(std::floor(spec.max_error_fraction * double(R)));

    ExperimentResult result;
    for (double delta : deltas) {
        std::vector<std::vector<double>> slots(R);
        parallel_for(R, spec.threads, [&](std::size_t r) { slots[r] = replicate(spec, delta, r); });

        for (std::size_t s = 0; s < k; ++s) {
            std::size_t errors = 0;
            for (std::size_t r = 0; r < R; ++r)
                if (std::isnan(slots[r][s])) ++errors;
            if (errors > limit)
                throw Error(Errc::TooManyFailures,
                            spec.statistics[s].label() + ": " + std::to_string(errors) + " of " +
                                std::to_string(R) + " replications failed");
            for (double alpha : spec.alphas) {
                std::size_t rej = 0;
                for (std::size_t r = 0; r < R; ++r) {
                    const double v = slots[r][s];
                    if (!std::isnan(v) && rejects(spec.statistics[s].kind, v, alpha)) ++rej;
                }
                RateEntry e;
                e.statistic = spec.statistics[s];
                e.alpha = alpha;
                e.delta = delta;
                e.n_reps = R;
                e.n_errors = errors;
                const double valid = double(R - errors);
                e.rejection_rate = valid > 0 ? double(rej) / valid : 0.0;
                e.mc_se = std::sqrt(e.rejection_rate * (1.0 - e.rejection_rate) / double(R));
                result.entries.push_back(e);
            }
        }
    }
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    ExperimentSpec single = spec;
    single.grid.clear();
    return power_curve(single);
}

void write_csv_header(std::ostream& os) {
    os << "family,T,T_m,T_n,scheme,loss,statistic,variance_estimator,alpha,delta,lambda0,p,"
          "rejection_rate,mc_se,n_reps,n_errors\n";
}

void write_csv_rows(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result) {
    const auto& d = spec.design;
    for (const auto& e : result.entries) {
        const VarianceKind v = needs_variance(e.statistic.kind)
                                   ? (e.statistic.variance == VarianceKind::None ? VarianceKind::NuL
                                                                                 : e.statistic.variance)
                                   : VarianceKind::None;
        os << to_string(spec.dgp.family) << ',' << d.total_obs << ',' << d.in_sample << ','
           << d.out_sample << ',' << to_string(d.scheme) << ',' << spec.loss.name() << ','
           << to_string(e.statistic.kind) << ',' << to_string(v) << ',' << fmt("%.4g", e.alpha)
           << ',' << fmt("%.6g", e.delta) << ',' << fmt("%.4g", spec.dgp.lambda0) << ','
           << p_column(spec.dgp) << ',' << fmt("%.6f", e.rejection_rate) << ','
           << fmt("%.6f", e.mc_se) << ',' << e.n_reps << ',' << e.n_errors << '\n';
    }
}

void write_csv(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result) {
    write_csv_header(os);
    write_csv_rows(os, spec, result);
}

std::string summary_json(const ExperimentSpec& spec, const ExperimentResult& result) {
    using nlohmann::json;
    json j;
    j["schema_version"] = kSummarySchemaVersion;
    j["family"] = std::string(to_string(spec.dgp.family));
    j["T"] = spec.design.total_obs;
    j["T_m"] = spec.design.in_sample;
    j["T_n"] = spec.design.out_sample;
    j["tau"] = spec.design.horizon;
    j["scheme"] = std::string(to_string(spec.design.scheme));
    j["loss"] = spec.loss.name();
    j["block_rule"] = std::string(to_string(spec.block_rule.regime));
    j["epsilon"] = spec.block_rule.epsilon;
    j["lambda0"] = spec.dgp.lambda0;
    j["p"] = p_column(spec.dgp);
    j["replications"] = spec.replications;
    j["base_seed"] = spec.base_seed;
    j["runtime_seconds"] = result.runtime_seconds;
    json rows = json::array();
    for (const auto& e : result.entries) {
        rows.push_back({{"statistic", e.statistic.label()},
                        {"alpha", e.alpha},
                        {"delta", e.delta},
                        {"rejection_rate", e.rejection_rate},
                        {"mc_se", e.mc_se},
                        {"n_reps", e.n_reps},
                        {"n_errors", e.n_errors}});
    }
    j["results"] = std::move(rows);
    return j.dump(2);
}

} // namespace fbreak
