#include "fbreak/forecasting.hpp"

#include <cmath>
#include <sstream>

#include "fbreak/error.hpp"

namespace fbreak {

using Eigen::Index;

LossFunction LossFunction::quadratic(double a) {
    LossFunction f;
    f.kind = Kind::Quadratic;
    f.a = a;
    f.validate();
    return f;
}

LossFunction LossFunction::linex(double a1, double a2) {
    LossFunction f;
    f.kind = Kind::Linex;
    f.a1 = a1;
    f.a2 = a2;
    f.validate();
    return f;
}

LossFunction LossFunction::absolute(double a) {
    LossFunction f;
    f.kind = Kind::AbsoluteError;
    f.a = a;
    f.validate();
    return f;
}

void LossFunction::validate() const {
    switch (kind) {
    case Kind::Quadratic:
    case Kind::AbsoluteError:
        if (!(a > 0.0)) throw Error(Errc::InvalidArgument, "loss scale a must be positive");
        break;
    case Kind::Linex:
        if (!(a1 > 0.0)) throw Error(Errc::InvalidArgument, "linex a1 must be positive");
        if (a2 == 0.0 || !std::isfinite(a2))
            throw Error(Errc::InvalidArgument, "linex a2 must be nonzero");
        break;
    }
}

double LossFunction::operator()(double e) const noexcept {
    switch (kind) {
    case Kind::Quadratic: return a * e * e;
    case Kind::Linex: return a1 * std::expm1(a2 * e) - a1 * a2 * e;
    case Kind::AbsoluteError: return a * std::abs(e);
    }
    return 0.0;
}

std::string LossFunction::name() const {
    switch (kind) {
    case Kind::Quadratic: return "quadratic";
    case Kind::Linex: return "linex";
    case Kind::AbsoluteError: return "absolute";
    }
    return "quadratic";
}

LossFunction loss_from_string(std::string_view name) {
    if (name == "quadratic") return LossFunction::quadratic();
    if (name == "linex") return LossFunction::linex();
    if (name == "absolute") return LossFunction::absolute();
    throw Error(Errc::InvalidArgument, "unknown loss '" + std::string(name) + "'");
}

namespace {

struct Window {
    std::size_t first;  // first regression index j (1-based)
    std::size_t last;
};

// Regression pairs (Y_j, X_{j-tau}) admissible at origin k.
Window window_at(const SampleDesign& d, std::size_t k) {
    switch (d.scheme) {
    case Scheme::Fixed: return {d.horizon + 1, d.in_sample};
    case Scheme::Recursive: return {d.horizon + 1, k};
    case Scheme::Rolling: return {k - d.in_sample + d.horizon + 1, k};
    }
    return {d.horizon + 1, d.in_sample};
}

void check_path(const SimulatedPath& path, const SampleDesign& d) {
    if (path.y.size() != d.total_obs)
        throw Error(Errc::InvalidArgument, "path length " + std::to_string(path.y.size()) +
                                               " does not match design T=" +
                                               std::to_string(d.total_obs));
    if (static_cast<std::size_t>(path.x.rows()) != d.total_obs)
        throw Error(Errc::InvalidArgument, "predictor rows do not match path length");
}

// Fills the regressor row for observation j: (1, X_{j-tau}).
template <class Row>
void regressors(const SimulatedPath& path, const SampleDesign& d, bool intercept, std::size_t j,
                Row&& row) {
    Index c = 0;
    if (intercept) row(c++) = 1.0;
    const auto xr = static_cast<Index>(j - d.horizon - 1);
    for (Index q = 0; q < path.x.cols(); ++q) row(c++) = path.x(xr, q);
}

Eigen::VectorXd fit(const SimulatedPath& path, const SampleDesign& d, bool intercept, Window w,
                    Index p) {
    const auto n = static_cast<Index>(w.last - w.first + 1);
    Eigen::MatrixXd z(n, p);
    Eigen::VectorXd yv(n);
    for (Index r = 0; r < n; ++r) {
        const std::size_t j = w.first + static_cast<std::size_t>(r);
        regressors(path, d, intercept, j, z.row(r));
        yv(r) = path.y[j - 1];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv.minCoeff() >= 1e-10 * sv.maxCoeff()) || sv.maxCoeff() == 0.0)
        throw Error(Errc::SingularDesign, "regressor matrix is rank deficient over window " +
                                              std::to_string(w.first) + ".." +
                                              std::to_string(w.last));
    return svd.solve(yv);
}

} // namespace

EstimatorTrace estimate_ols(const SimulatedPath& path, const SampleDesign& d, bool intercept) {
    check_path(path, d);
    const Index p = path.x.cols() + (intercept ? 1 : 0);
    if (p == 0) throw Error(Errc::InvalidArgument, "model has no regressors");
    if (d.in_sample < d.horizon + static_cast<std::size_t>(p) + 1)
        throw Error(Errc::InsufficientSample, "estimation window too short for " +
                                                  std::to_string(p) + " coefficients");

    EstimatorTrace trace;
    trace.intercept = intercept;
    trace.coefficients.resize(static_cast<Index>(d.out_sample), p);
    if (d.scheme == Scheme::Fixed) {
        const Eigen::VectorXd b = fit(path, d, intercept, window_at(d, d.in_sample), p);
        trace.coefficients.rowwise() = b.transpose();
        return trace;
    }
    for (std::size_t r = 0; r < d.out_sample; ++r) {
        const std::size_t k = d.in_sample + r;
        trace.coefficients.row(static_cast<Index>(r)) =
            fit(path, d, intercept, window_at(d, k), p).transpose();
    }
    return trace;
}

LossSeries compute_losses(const SimulatedPath& path, const SampleDesign& d,
                          const EstimatorTrace& trace, const LossFunction& loss) {
    check_path(path, d);
    loss.validate();
    const Index p = path.x.cols() + (trace.intercept ? 1 : 0);
    if (trace.coefficients.rows() != static_cast<Index>(d.out_sample) ||
        trace.coefficients.cols() != p)
        throw Error(Errc::InvalidArgument, "estimator trace does not match the design");

    const double inv_psi = 1.0 / d.psi();
    Eigen::VectorXd row(p);
    auto residual = [&](std::size_t j, const Eigen::VectorXd& b) {
        regressors(path, d, trace.intercept, j, row);
        return path.y[j - 1] - row.dot(b);
    };
    auto in_sample_mean = [&](Window w, const Eigen::VectorXd& b) {
        double s = 0.0;
        for (std::size_t j = w.first; j <= w.last; ++j) s += loss(inv_psi * residual(j, b));
        return s / static_cast<double>(w.last - w.first + 1);
    };

    std::vector<double> values(d.out_sample), surprise(d.out_sample), in_sample;
    const Window first = window_at(d, d.in_sample);
    const Eigen::VectorXd b0 = trace.coefficients.row(0).transpose();
    in_sample.reserve(first.last - first.first + 1);
    for (std::size_t j = first.first; j <= first.last; ++j)
        in_sample.push_back(loss(inv_psi * residual(j, b0)));
    double fixed_mean = 0.0;
    for (double v : in_sample) fixed_mean += v;
    fixed_mean /= static_cast<double>(in_sample.size());
    for (std::size_t r = 0; r < d.out_sample; ++r) {
        const std::size_t k = d.in_sample + r;
        const Eigen::VectorXd b = trace.coefficients.row(static_cast<Index>(r)).transpose();
        const double l = loss(inv_psi * residual(k + d.horizon, b));
        const double lbar = d.scheme == Scheme::Fixed ? fixed_mean : in_sample_mean(window_at(d, k), b);
        values[r] = l;
        surprise[r] = l - lbar;
    }
    return LossSeries(std::move(values), std::move(surprise), d.in_sample, std::move(in_sample));
}

double newey_west(std::span<const double> x, std::size_t lag) {
    const std::size_t n = x.size();
    if (n < 2) throw Error(Errc::InsufficientSample, "long-run variance needs >= 2 observations");
    if (lag >= n) throw Error(Errc::InvalidArgument, "lag must be smaller than the sample size");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> dm(n);
    for (std::size_t t = 0; t < n; ++t) dm[t] = x[t] - mean;
    auto gamma = [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t t = j; t < n; ++t) s += dm[t] * dm[t - j];
        return s / static_cast<double>(n);
    };
    double s2 = gamma(0);
    for (std::size_t j = 1; j <= lag; ++j)
        s2 += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(lag + 1)) * gamma(j);
    return s2;
}

std::size_t gr_lag(std::size_t out_sample) {
    return static_cast<std::size_t>(
        std::floor(std::cbrt(static_cast<double>(out_sample)) * (1.0 + 1e-12)));
}

double gr_scheme_factor(Scheme scheme, double pi) {
    if (!(pi > 0.0)) throw Error(Errc::InvalidArgument, "pi must be positive");
    switch (scheme) {
    case Scheme::Fixed: return 1.0 + pi;
    case Scheme::Recursive: return 1.0;
    case Scheme::Rolling: return pi <= 1.0 ? 1.0 - pi * pi / 3.0 : 2.0 / (3.0 * pi);
    }
    return 1.0;
}

namespace {

double studentize(std::span<const double> sl, std::span<const double> var_source, double factor) {
    const std::size_t n = sl.size();
    if (n < 10) throw Error(Errc::InsufficientSample, "GR t-statistic needs T_n >= 10");
    double mean = 0.0;
    for (double v : sl) mean += v;
    mean /= static_cast<double>(n);
    double vm = 0.0, ss = 0.0;
    for (double v : var_source) vm += v;
    vm /= static_cast<double>(var_source.size());
    for (double v : var_source) ss += (v - vm) * (v - vm);
    const double var = factor * newey_west(var_source, gr_lag(n));
    const double scale = factor * (vm * vm + ss / static_cast<double>(var_source.size()));
    if (!(var > 1e-12 * scale))
        throw Error(Errc::DegenerateVariance, "long-run variance of the losses is zero");
    return std::sqrt(static_cast<double>(n)) * mean / std::sqrt(var);
}

} // namespace

double gr_tstat(std::span<const double> sl) { return studentize(sl, sl, 1.0); }

double gr_tstat(const LossSeries& series, const SampleDesign& design) {
    if (series.size() != design.out_sample)
        throw Error(Errc::InvalidArgument, "loss series does not match the design");
    const double pi = static_cast<double>(design.out_sample) / static_cast<double>(design.in_sample);
    const double factor = gr_scheme_factor(design.scheme, pi);
    if (series.in_sample().empty()) return studentize(series.surprise(), series.surprise(), factor);
    std::vector<double> pooled(series.in_sample());
    pooled.insert(pooled.end(), series.values().begin(), series.values().end());
    return studentize(series.surprise(), pooled, factor);
}

} // namespace fbreak
