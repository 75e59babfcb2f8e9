#include "doctest.h"

#include <cmath>
#include <random>

#include "fbreak/error.hpp"
#include "fbreak/forecasting.hpp"
#include "oracle.hpp"

using namespace fbreak;

namespace {

SimulatedPath small_path(std::size_t T, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> z;
    SimulatedPath p;
    p.y.resize(T);
    p.x.resize(static_cast<Eigen::Index>(T), 1);
    for (std::size_t i = 0; i < T; ++i) {
        p.x(static_cast<Eigen::Index>(i), 0) = z(eng);
        p.y[i] = 1.0 + 0.5 * (i ? p.x(static_cast<Eigen::Index>(i) - 1, 0) : 0.0) + z(eng);
    }
    return p;
}

// Simple regression of Y_j on (1, X_{j-tau}) over j in [first, last] by normal equations.
std::pair<double, double> naive_fit(const SimulatedPath& p, std::size_t tau, std::size_t first,
                                    std::size_t last) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t j = first; j <= last; ++j) {
        const double x = p.x(static_cast<Eigen::Index>(j - tau - 1), 0);
        const double y = p.y[j - 1];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {(sy - b * sx) / n, b};
}

} // namespace

TEST_CASE("loss functions") {
    CHECK(LossFunction::quadratic()(2.0) == 4.0);
    CHECK(LossFunction::quadratic(3.0)(2.0) == 12.0);
    CHECK(LossFunction::absolute()(-2.5) == 2.5);
    const auto lx = LossFunction::linex(1.0, 1.0);
    CHECK(lx(0.0) == 0.0);
    CHECK(lx(1.0) == doctest::Approx(std::exp(1.0) - 2.0));
    CHECK(lx(1e-9) == doctest::Approx(0.5e-18).epsilon(1e-6));
    CHECK(lx(1.0) > lx(-1.0));
    CHECK(loss_from_string("linex").kind == LossFunction::Kind::Linex);
    CHECK_THROWS_AS(loss_from_string("huber"), Error);
    CHECK_THROWS_AS(LossFunction::linex(1.0, 0.0).validate(), Error);
}

TEST_CASE("OLS and losses match a naive fit for every scheme") {
    const std::size_t T = 60;
    const auto path = small_path(T, 4);
    for (auto scheme : {Scheme::Fixed, Scheme::Recursive, Scheme::Rolling}) {
        for (std::size_t tau : {1u, 2u}) {
            const auto d = SampleDesign::make(T, 30, tau, scheme);
            const auto trace = estimate_ols(path, d);
            const auto L = compute_losses(path, d, trace, LossFunction::quadratic());
            REQUIRE(L.size() == d.out_sample);
            for (std::size_t r = 0; r < d.out_sample; ++r) {
                const std::size_t k = 30 + r;
                std::size_t first = tau + 1, last = 30;
                if (scheme == Scheme::Recursive) last = k;
                if (scheme == Scheme::Rolling) {
                    first = k - 30 + tau + 1;
                    last = k;
                }
                const auto [a, b] = naive_fit(path, tau, first, last);
                CHECK(trace.coefficients(static_cast<Eigen::Index>(r), 0) == doctest::Approx(a).epsilon(1e-10));
                CHECK(trace.coefficients(static_cast<Eigen::Index>(r), 1) == doctest::Approx(b).epsilon(1e-10));
                const double e = path.y[k + tau - 1] - a - b * path.x(static_cast<Eigen::Index>(k - 1), 0);
                CHECK(L.values()[r] == doctest::Approx(e * e).epsilon(1e-10));
                double lbar = 0.0;
                for (std::size_t j = first; j <= last; ++j) {
                    const double u = path.y[j - 1] - a - b * path.x(static_cast<Eigen::Index>(j - tau - 1), 0);
                    lbar += u * u;
                }
                lbar /= double(last - first + 1);
                CHECK(L.surprise()[r] == doctest::Approx(e * e - lbar).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("intercept-only forecasts use the window mean") {
    SimulatedPath p;
    p.y = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    p.x.resize(10, 0);
    const auto d = SampleDesign::make(10, 4);
    const auto L = forecast_losses(p, d, LossFunction::quadratic());
    // mean of Y_2..Y_4 = 3; first forecast error Y_5 - 3 = 2
    CHECK(L.values()[0] == doctest::Approx(4.0));
}

TEST_CASE("singular design is reported") {
    SimulatedPath p;
    p.y.assign(40, 1.0);
    p.x = Eigen::MatrixXd::Ones(40, 1);
    const auto d = SampleDesign::make(40, 20);
    try {
        estimate_ols(p, d);
        FAIL("expected SingularDesign");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularDesign);
    }
}

TEST_CASE("Newey-West") {
    std::mt19937_64 eng(3);
    std::normal_distribution<double> z;
    std::vector<double> x(500);
    for (auto& v : x) v = z(eng);
    CHECK(newey_west(x, 0) == doctest::Approx(oracle::var(x, 0, x.size())).epsilon(1e-12));
    for (std::size_t lag : {1u, 4u, 9u})
        CHECK(newey_west(x, lag) == doctest::Approx(oracle::newey_west(x, lag)).epsilon(1e-12));
    CHECK_THROWS_AS(newey_west(std::vector<double>{1.0}, 0), Error);
}

TEST_CASE("GR lag and scheme factors") {
    CHECK(gr_lag(100) == 4);
    CHECK(gr_lag(125) == 5);
    CHECK(gr_lag(1000) == 10);
    CHECK(gr_scheme_factor(Scheme::Fixed, 0.5) == doctest::Approx(1.5));
    CHECK(gr_scheme_factor(Scheme::Recursive, 2.0) == doctest::Approx(1.0));
    CHECK(gr_scheme_factor(Scheme::Rolling, 0.5) == doctest::Approx(1.0 - 0.25 / 3.0));
    CHECK(gr_scheme_factor(Scheme::Rolling, 2.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("GR t statistic on a fixed sequence") {
    std::vector<double> sl(50);
    for (std::size_t i = 0; i < sl.size(); ++i) sl[i] = std::sin(double(i)) + 0.1;
    double mu = 0.0;
    for (double v : sl) mu += v;
    mu /= double(sl.size());
    const double expect = std::sqrt(50.0) * mu / std::sqrt(oracle::newey_west(sl, 3));
    CHECK(gr_tstat(sl) == doctest::Approx(expect).epsilon(1e-12));
    std::vector<double> flat(50, 1.0);
    CHECK_THROWS_AS(gr_tstat(flat), Error);
}
