#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fbreak/dgp.hpp"
#include "fbreak/timeseries.hpp"

namespace fbreak {

struct LossFunction {
    enum class Kind { Quadratic, Linex, AbsoluteError };

    Kind kind = Kind::Quadratic;
    double a = 1.0;
    double a1 = 1.0;
    double a2 = 1.0;

    static LossFunction quadratic(double a = 1.0);
    static LossFunction linex(double a1 = 1.0, double a2 = 1.0);
    static LossFunction absolute(double a = 1.0);

    void validate() const;
    double operator()(double e) const noexcept;
    std::string name() const;
};

LossFunction loss_from_string(std::string_view name);

// Row r holds the estimate made at forecast origin in_sample + r.
// Columns: intercept first (if any), then one slope per predictor.
struct EstimatorTrace {
    Eigen::MatrixXd coefficients;
    bool intercept = true;
};

EstimatorTrace estimate_ols(const SimulatedPath& path, const SampleDesign& design,
                            bool intercept = true);

LossSeries compute_losses(const SimulatedPath& path, const SampleDesign& design,
                          const EstimatorTrace& trace, const LossFunction& loss);

inline LossSeries forecast_losses(const SimulatedPath& path, const SampleDesign& design,
                                  const LossFunction& loss, bool intercept = true) {
    return compute_losses(path, design, estimate_ols(path, design, intercept), loss);
}

// Bartlett-weighted long-run variance, autocovariances with divisor n.
double newey_west(std::span<const double> x, std::size_t lag);

// floor(T_n^{1/3})
std::size_t gr_lag(std::size_t out_sample);

// Variance multiplier for the in-sample averaging term, pi = T_n / T_m.
double gr_scheme_factor(Scheme scheme, double pi);

// sqrt(T_n) * mean(SL) / sigma_hat with sigma_hat^2 = newey_west(SL, gr_lag(T_n))
double gr_tstat(std::span<const double> surprise);

// Scheme-aware version: sigma_hat^2 = gr_scheme_factor * newey_west(pooled, gr_lag(T_n)),
// pooling the in-sample residual losses with the out-of-sample losses when available.
double gr_tstat(const LossSeries& series, const SampleDesign& design);

} // namespace fbreak
