#include "fbreak/dgp.hpp"

#include <array>
#include <cmath>
#include <string>

#include "fbreak/error.hpp"
#include "fbreak/rng.hpp"

namespace fbreak {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 17> kFamilyNames{{
    {Family::S1, "S1"}, {Family::S2, "S2"}, {Family::S3, "S3"}, {Family::S4, "S4"},
    {Family::S5, "S5"}, {Family::S6, "S6"}, {Family::P1a, "P1a"}, {Family::P1b, "P1b"},
    {Family::P2, "P2"}, {Family::P3, "P3"}, {Family::P4, "P4"}, {Family::P5, "P5"},
    {Family::P6, "P6"}, {Family::P7, "P7"}, {Family::P8, "P8"},
    {Family::ContinuousTime, "ContinuousTime"}, {Family::LocalAlternative, "LocalAlternative"},
}};

enum class XKind { Iid, Ar1, LaggedY, None };
enum class EKind { Iid, Arch, Ar1 };
enum class Shift { None, Slope, Scale, Mean, RecurrentMean, RecurrentScale };

// Y_t = mu + (beta + slope_t) X_{t-1} + mean_t + scale_t e_t
struct LinearModel {
    double mu = 0.0;
    double beta = 0.0;
    XKind x = XKind::Iid;
    double x_mean = 0.0;
    double x_sd = 1.0;    // iid sd, or AR innovation sd
    double x_ar = 0.0;
    EKind e = EKind::Iid;
    double e_sd = 1.0;    // iid sd, or AR innovation sd
    double e_ar = 0.0;
    double arch_omega = 0.0;
    double arch_alpha = 0.0;
    Shift shift = Shift::None;
};

LinearModel model_for(Family f) {
    LinearModel m;
    switch (f) {
    case Family::S1:
    case Family::P1a:
        m.mu = 2.73; m.beta = -0.44;
        m.shift = f == Family::P1a ? Shift::Slope : Shift::None;
        break;
    case Family::S2:
        m.mu = 2.73; m.beta = -0.44;
        m.e = EKind::Arch; m.arch_omega = 1.0; m.arch_alpha = 0.5;
        break;
    case Family::S3:
    case Family::P2:
        m.mu = 0.0; m.beta = 1.0;
        m.x = XKind::Ar1; m.x_ar = 0.4; m.x_sd = std::sqrt(1.0 - 0.16);
        m.e_sd = 0.7;
        m.shift = f == Family::P2 ? Shift::Slope : Shift::None;
        break;
    case Family::S4:
        m.mu = 0.0; m.beta = 0.4; m.x = XKind::LaggedY; m.e_sd = 0.7;
        break;
    case Family::S5:
    case Family::P6:
        m.mu = 0.0; m.beta = 0.3; m.x = XKind::LaggedY; m.e_sd = 0.7;
        m.shift = f == Family::P6 ? Shift::Mean : Shift::None;
        break;
    case Family::S6:
        m.mu = 2.73; m.beta = -0.44; m.e = EKind::Ar1; m.e_ar = 0.3;
        break;
    case Family::P1b:
        m.mu = 2.73; m.beta = -0.44; m.x_mean = 1.0; m.shift = Shift::Slope;
        break;
    case Family::P3:
        m.x = XKind::None; m.e_sd = 0.8; m.shift = Shift::RecurrentMean;
        break;
    case Family::P4:
        m.mu = 0.0; m.beta = 0.5; m.x_mean = 1.0; m.shift = Shift::Scale;
        break;
    case Family::P5:
        m.x = XKind::None; m.e_sd = 0.7; m.shift = Shift::RecurrentScale;
        break;
    case Family::P7:
        m.mu = 2.73; m.beta = -0.44; m.x_sd = std::sqrt(1.5);
        m.e = EKind::Arch; m.arch_omega = 0.5; m.arch_alpha = 0.5;
        m.shift = Shift::Slope;
        break;
    case Family::P8:
        m.mu = 1.0; m.beta = 1.0; m.x_sd = std::sqrt(1.4);
        m.e = EKind::Ar1; m.e_ar = 0.4;
        m.shift = Shift::Slope;
        break;
    default:
        throw Error(Errc::UnknownFamily, std::string(to_string(f)) + " is not a linear design");
    }
    return m;
}

SimulatedPath simulate_linear(const LinearModel& m, const DgpSpec& spec, std::size_t T) {
    auto eng = make_engine(spec.seed);
    std::normal_distribution<double> norm(0.0, 1.0);

    const auto tb = static_cast<long>(std::floor(static_cast<double>(T) * spec.lambda0));
    const auto period = static_cast<long>(spec.switch_period);
    auto active = [&](long t) -> bool {
        if (t < 1) return false;
        if (m.shift == Shift::RecurrentMean || m.shift == Shift::RecurrentScale)
            return ((t - 1) / period) % 2 == 1;
        if (t <= tb) return false;
        return !spec.duration || t <= tb + static_cast<long>(*spec.duration);
    };

    const bool with_x = m.x != XKind::None;
    SimulatedPath path;
    path.y.resize(T);
    path.x.resize(static_cast<Eigen::Index>(T), with_x ? 1 : 0);

    double x_prev = m.x == XKind::Ar1 ? 0.0 : m.x_mean;
    double y_prev = 0.0;
    double e_prev = 0.0;
    const long first = 1 - static_cast<long>(kBurnIn);
    for (long t = first; t <= static_cast<long>(T); ++t) {
        const double zx = norm(eng);
        const double ze = norm(eng);

        double e = 0.0;
        switch (m.e) {
        case EKind::Iid: e = m.e_sd * ze; break;
        case EKind::Arch: e = std::sqrt(m.arch_omega + m.arch_alpha * e_prev * e_prev) * ze; break;
        case EKind::Ar1: e = m.e_ar * e_prev + m.e_sd * ze; break;
        }
        e_prev = e;

        const double d = active(t) ? spec.delta : 0.0;
        const double pred = m.x == XKind::LaggedY ? y_prev : x_prev;
        double y = m.mu;
        switch (m.shift) {
        case Shift::None: y += m.beta * pred + e; break;
        case Shift::Slope: y += (m.beta + d) * pred + e; break;
        case Shift::Scale: y += m.beta * pred + (1.0 + d) * e; break;
        case Shift::Mean: y += d + m.beta * pred + e; break;
        case Shift::RecurrentMean: y += d + e; break;
        case Shift::RecurrentScale: y += (1.0 + d) * e; break;
        }

        double x = 0.0;
        switch (m.x) {
        case XKind::Iid: x = m.x_mean + m.x_sd * zx; break;
        case XKind::Ar1: x = m.x_ar * x_prev + m.x_sd * zx; break;
        case XKind::LaggedY: x = y; break;
        case XKind::None: break;
        }
        x_prev = x;
        y_prev = y;

        if (t >= 1) {
            const auto i = static_cast<std::size_t>(t - 1);
            if (!std::isfinite(y) || !std::isfinite(x))
                throw Error(Errc::DomainError, "non-finite value in simulated path at t=" +
                                                   std::to_string(t));
            path.y[i] = y;
            if (with_x) path.x(static_cast<Eigen::Index>(i), 0) = x;
        }
    }

    if (m.shift == Shift::RecurrentMean || m.shift == Shift::RecurrentScale) {
        if (spec.delta != 0.0 && spec.switch_period < T) path.true_break_index = spec.switch_period;
    } else if (m.shift != Shift::None && spec.delta != 0.0) {
        path.true_break_index = static_cast<std::size_t>(tb);
    }
    return path;
}

} // namespace

std::string_view to_string(Family f) noexcept {
    for (const auto& [fam, name] : kFamilyNames)
        if (fam == f) return name;
    return "?";
}

Family family_from_string(std::string_view name) {
    for (const auto& [fam, n] : kFamilyNames)
        if (n == name) return fam;
    throw Error(Errc::UnknownFamily, "unknown DGP family '" + std::string(name) + "'");
}

bool has_predictor(Family f) noexcept { return f != Family::P3 && f != Family::P5; }

void DgpSpec::validate() const {
    if (!(lambda0 > 0.0 && lambda0 < 1.0))
        throw Error(Errc::InvalidArgument, "lambda0 must lie in (0,1)");
    if (!std::isfinite(delta)) throw Error(Errc::InvalidArgument, "delta must be finite");
    if (duration && *duration < 1) throw Error(Errc::InvalidArgument, "duration must be >= 1");
    if (switch_period < 1) throw Error(Errc::InvalidArgument, "switch period must be >= 1");
    if ((family == Family::P4 || family == Family::P5) && delta <= -1.0)
        throw Error(Errc::InvalidArgument, "variance-break designs need delta > -1");
    if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "h must be positive");
}

SimulatedPath simulate(const DgpSpec& spec, std::size_t T) {
    spec.validate();
    if (T < 20) throw Error(Errc::InsufficientSample, "simulated paths need T >= 20");
    if (spec.family == Family::ContinuousTime)
        return simulate_continuous(spec.continuous, T, spec.h, spec.seed);
    if (spec.family == Family::LocalAlternative) {
        const std::size_t tm = spec.local_in_sample ? spec.local_in_sample : T / 2;
        if (tm + 2 > T) throw Error(Errc::InsufficientSample, "in-sample size exceeds T");
        const std::size_t tn = T - tm;
        const std::size_t n = static_cast<std::size_t>(
            std::floor(std::pow(static_cast<double>(tn), 2.0 / 3.0) * (1.0 + 1e-12)));
        const double tb = std::floor(static_cast<double>(T) * spec.lambda0);
        const double d = spec.delta;
        auto path = simulate_local_alternative([tb, d](double t) { return t > tb ? d : 0.0; }, T,
                                               tm, n, spec.seed);
        if (d != 0.0) path.true_break_index = static_cast<std::size_t>(tb);
        return path;
    }
    return simulate_linear(model_for(spec.family), spec, T);
}

SimulatedPath simulate_continuous(const ContinuousModel& model, std::size_t T, double h,
                                  std::uint64_t seed) {
    if (!(model.theta >= 0.0 && model.theta < 0.125))
        throw Error(Errc::InvalidTheta, "theta must lie in [0, 1/8)");
    if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "h must be positive");
    if (model.beta_star.empty()) throw Error(Errc::InvalidArgument, "beta_star must be nonempty");
    if (model.horizon < 1) throw Error(Errc::InvalidArgument, "horizon must be >= 1");

    const std::size_t q = model.beta_star.size();
    const std::size_t tau = model.horizon;
    auto eng = make_engine(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    const double sqh = std::sqrt(h);
    const double drift_scale = std::pow(h, 1.0 - model.theta);

    // dx row r holds Delta X_{r+1-tau}; the first tau rows precede the sample
    Eigen::MatrixXd dx(static_cast<Eigen::Index>(T + tau), static_cast<Eigen::Index>(q));
    SimulatedPath path;
    path.y.resize(T);
    for (std::size_t r = 0; r < T + tau; ++r) {
        const double s = (static_cast<double>(r) - static_cast<double>(tau)) * h;
        for (std::size_t c = 0; c < q; ++c)
            dx(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                model.mu_x(s) * h + model.sigma_x(s) * sqh * norm(eng);
    }
    for (std::size_t k = 1; k <= T; ++k) {
        const double s_prev = static_cast<double>(k - 1) * h;
        const double s_now = static_cast<double>(k) * h;
        double dy = 0.0;
        const auto lag_row = static_cast<Eigen::Index>(k - 1);  // Delta X_{k-tau}
        for (std::size_t c = 0; c < q; ++c)
            dy += model.beta_star[c] * dx(lag_row, static_cast<Eigen::Index>(c));
        dy += model.mu_e(s_now) * drift_scale + model.sigma_e(s_prev) * sqh * norm(eng);
        path.y[k - 1] = dy;
    }
    path.x = dx.bottomRows(static_cast<Eigen::Index>(T));
    for (double v : path.y)
        if (!std::isfinite(v)) throw Error(Errc::DomainError, "non-finite continuous path");
    return path;
}

double local_rate(std::size_t out_sample, std::size_t block_len) {
    if (out_sample < 2 || block_len < 1)
        throw Error(Errc::InvalidArgument, "local rate needs T_n >= 2 and n_T >= 1");
    return std::pow(std::log(static_cast<double>(out_sample)) * static_cast<double>(block_len),
                    -0.25);
}

SimulatedPath simulate_local_alternative(const TimeFn& mu_beta, std::size_t T,
                                         std::size_t in_sample, std::size_t block_len,
                                         std::uint64_t seed) {
    if (T < 20) throw Error(Errc::InsufficientSample, "simulated paths need T >= 20");
    if (in_sample + 2 > T) throw Error(Errc::InsufficientSample, "in-sample size exceeds T");
    const double rate = local_rate(T - in_sample, block_len);

    auto eng = make_engine(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    constexpr double mu = 2.73;
    constexpr double beta_star = -0.44;

    SimulatedPath path;
    path.y.resize(T);
    path.x.resize(static_cast<Eigen::Index>(T), 1);
    double x_prev = 0.0;
    const long first = 1 - static_cast<long>(kBurnIn);
    for (long t = first; t <= static_cast<long>(T); ++t) {
        const double zx = norm(eng);
        const double ze = norm(eng);
        const double offset = t >= 1 ? mu_beta(static_cast<double>(t)) : 0.0;
        if (!std::isfinite(offset)) throw Error(Errc::InvalidArgument, "mu_beta must be bounded");
        double y = mu;
        y += (beta_star + offset * rate) * x_prev + ze;
        x_prev = zx;
        if (t >= 1) {
            path.y[static_cast<std::size_t>(t - 1)] = y;
            path.x(t - 1, 0) = zx;
        }
    }
    return path;
}

} // namespace fbreak
