#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fbreak {

enum class Family {
    S1, S2, S3, S4, S5, S6,
    P1a, P1b, P2, P3, P4, P5, P6, P7, P8,
    ContinuousTime, LocalAlternative,
};

std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view name);
bool has_predictor(Family f) noexcept;  // false for the intercept-only designs P3, P5

inline constexpr std::size_t kBurnIn = 200;

using TimeFn = std::function<double(double)>;

// dX = mu_x dt + sigma_x dW_x ; dY = beta*' dX_{t-tau} + mu_e h^{1-theta} + sigma_e dW_e
struct ContinuousModel {
    TimeFn mu_x = [](double) { return 0.0; };
    TimeFn sigma_x = [](double) { return 1.0; };
    TimeFn mu_e = [](double) { return 0.0; };
    TimeFn sigma_e = [](double) { return 1.0; };
    std::vector<double> beta_star{1.0};
    double theta = 0.0;
    std::size_t horizon = 1;
};

struct DgpSpec {
    Family family = Family::S1;
    double delta = 0.0;
    double lambda0 = 0.5;
    std::optional<std::size_t> duration;  // short-term instability length p; empty = permanent
    std::size_t switch_period = 30;       // recurrent designs P3, P5
    std::uint64_t seed = 0;

    // ContinuousTime
    ContinuousModel continuous;
    double h = 1.0;

    // LocalAlternative: mu_beta(t) = delta * 1{t > floor(T lambda0)}
    std::size_t local_in_sample = 0;  // 0 -> T/2

    void validate() const;
};

struct SimulatedPath {
    std::vector<double> y;  // y[i] = Y_{i+1}
    Eigen::MatrixXd x;      // row i = predictor observed at time i+1
    std::optional<std::size_t> true_break_index;

    std::size_t size() const noexcept { return y.size(); }
};

SimulatedPath simulate(const DgpSpec& spec, std::size_t T);

SimulatedPath simulate_continuous(const ContinuousModel& model, std::size_t T, double h,
                                  std::uint64_t seed);

// (log(T_n) n_T)^{-1/4}
double local_rate(std::size_t out_sample, std::size_t block_len);

SimulatedPath simulate_local_alternative(const TimeFn& mu_beta, std::size_t T,
                                         std::size_t in_sample, std::size_t block_len,
                                         std::uint64_t seed);

} // namespace fbreak
