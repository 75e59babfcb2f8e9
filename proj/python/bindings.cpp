#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fbreak/cli.hpp"
#include "fbreak/error.hpp"
#include "fbreak/forecasting.hpp"
#include "fbreak/harness.hpp"
#include "fbreak/teststats.hpp"
#include "fbreak/variance.hpp"

namespace py = pybind11;
using namespace fbreak;

namespace {

BlockRule make_rule(const std::string& regime, double epsilon) {
    BlockRule r;
    r.regime = regime_from_string(regime);
    r.epsilon = epsilon;
    r.validate();
    return r;
}

SimulatedPath make_path(std::vector<double> y, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.rows()) != y.size() && x.size() != 0)
        throw Error(Errc::InvalidArgument, "x must have one row per observation");
    SimulatedPath p;
    p.y = std::move(y);
    p.x = x.size() == 0 ? Eigen::MatrixXd(static_cast<Eigen::Index>(p.y.size()), 0) : x;
    return p;
}

py::dict report_dict(const TestReport& r) {
    py::dict d;
    d["statistic"] = std::string(to_string(r.statistic_kind));
    d["variance_estimator"] = std::string(to_string(r.variance_estimator_used));
    d["variance_value"] = r.variance_value;
    d["raw"] = r.raw;
    d["transformed"] = r.transformed;
    d["critical_value"] = r.critical_value;
    d["p_value"] = r.p_value;
    d["reject"] = r.reject;
    d["alpha"] = r.alpha;
    d["n_T"] = r.n_T;
    d["m_T"] = r.m_T;
    return d;
}

StatisticChoice choice(const std::string& label) {
    return parse_statistic(label, VarianceKind::NuL);
}

} // namespace

PYBIND11_MODULE(_fbreak, m) {
    m.doc() = "Forecast instability tests";
    m.attr("__version__") = std::string(kVersion);

    py::register_exception<Error>(m, "FbreakError", PyExc_ValueError);

    m.def("critical_value", &critical_value, py::arg("alpha"));
    m.def("cdf_V", &cdf_V, py::arg("v"));
    m.def("quantile_V", &quantile_V, py::arg("q"));
    m.def(
        "newey_west", [](const std::vector<double>& x, std::size_t lag) { return newey_west(x, lag); },
        py::arg("x"), py::arg("lag"));

    m.def(
        "simulate",
        [](const std::string& family, std::size_t T, double delta, double lambda0,
           std::optional<std::size_t> duration, std::size_t switch_period, std::uint64_t seed) {
            DgpSpec s;
            s.family = family_from_string(family);
            s.delta = delta;
            s.lambda0 = lambda0;
            s.duration = duration;
            s.switch_period = switch_period;
            s.seed = seed;
            const auto p = simulate(s, T);
            return py::make_tuple(p.y, p.x);
        },
        py::arg("family"), py::arg("T"), py::arg("delta") = 0.0, py::arg("lambda0") = 0.5,
        py::arg("duration") = py::none(), py::arg("switch_period") = 30, py::arg("seed") = 0,
        "Simulate one path; returns (y, x) with x of shape (T, q).");

    m.def(
        "forecast_losses",
        [](std::vector<double> y, const Eigen::MatrixXd& x, std::size_t in_sample, std::size_t horizon,
           const std::string& scheme, const std::string& loss) {
            const auto path = make_path(std::move(y), x);
            const auto design = SampleDesign::make(path.size(), in_sample, horizon, scheme_from_string(scheme));
            const auto s = forecast_losses(path, design, loss_from_string(loss));
            return py::make_tuple(s.values(), s.surprise());
        },
        py::arg("y"), py::arg("x"), py::arg("in_sample"), py::arg("horizon") = 1,
        py::arg("scheme") = "fixed", py::arg("loss") = "quadratic",
        "Pseudo out-of-sample losses; returns (losses, surprise_losses).");

    m.def(
        "test_losses",
        [](std::vector<double> losses, std::vector<double> surprise, const std::string& statistic,
           double alpha, const std::string& block_rule, double epsilon) {
            const LossSeries s(std::move(losses), std::move(surprise));
            const auto p = select_block_size(s.size(), make_rule(block_rule, epsilon));
            const auto c = choice(statistic);
            return report_dict(run_test(s, p, c.kind, c.variance, alpha));
        },
        py::arg("losses"), py::arg("surprise"), py::arg("statistic") = "Qmax[nuL]",
        py::arg("alpha") = 0.05, py::arg("block_rule") = "lipschitz", py::arg("epsilon") = 0.0,
        "Run one test on an out-of-sample loss series.");

    m.def(
        "test_forecasts",
        [](std::vector<double> y, const Eigen::MatrixXd& x, std::optional<std::size_t> in_sample,
           const std::vector<std::string>& statistics, double alpha, std::size_t horizon,
           const std::string& scheme, const std::string& loss) {
            CliConfig cfg;
            cfg.in_sample = in_sample;
            cfg.horizon = horizon;
            cfg.scheme = scheme_from_string(scheme);
            cfg.loss = loss_from_string(loss);
            cfg.alphas = {alpha};
            for (const auto& st : statistics) cfg.statistics.push_back(choice(st));
            DataSet data;
            data.path = make_path(std::move(y), x);
            const auto run = run_data_test(data, cfg);
            py::list out;
            for (const auto& r : run.reports) out.append(report_dict(r));
            return out;
        },
        py::arg("y"), py::arg("x"), py::arg("in_sample") = py::none(),
        py::arg("statistics") = std::vector<std::string>{"Qmax[nuL]"}, py::arg("alpha") = 0.05,
        py::arg("horizon") = 1, py::arg("scheme") = "fixed", py::arg("loss") = "quadratic",
        "Estimate forecasts from (y, x) and run the selected tests.");

    m.def(
        "run_experiment",
        [](const std::string& family, std::size_t T, std::size_t in_sample,
           const std::vector<std::string>& statistics, std::vector<double> alphas, std::vector<double> grid,
           double delta, double lambda0, std::optional<std::size_t> duration, std::size_t replications,
           std::uint64_t seed, std::size_t threads, const std::string& scheme, const std::string& loss) {
            ExperimentSpec s;
            s.dgp.family = family_from_string(family);
            s.dgp.delta = delta;
            s.dgp.lambda0 = lambda0;
            s.dgp.duration = duration;
            s.design = SampleDesign::make(T, in_sample, 1, scheme_from_string(scheme));
            s.loss = loss_from_string(loss);
            for (const auto& st : statistics) s.statistics.push_back(choice(st));
            s.alphas = std::move(alphas);
            s.grid = std::move(grid);
            s.replications = replications;
            s.base_seed = seed;
            s.threads = threads;
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = power_curve(s);
            }
            py::list rows;
            for (const auto& e : r.entries) {
                py::dict d;
                d["statistic"] = e.statistic.label();
                d["alpha"] = e.alpha;
                d["delta"] = e.delta;
                d["rejection_rate"] = e.rejection_rate;
                d["mc_se"] = e.mc_se;
                d["n_reps"] = e.n_reps;
                d["n_errors"] = e.n_errors;
                rows.append(d);
            }
            return rows;
        },
        py::arg("family"), py::arg("T"), py::arg("in_sample"),
        py::arg("statistics") = std::vector<std::string>{"Qmax[nuL]"},
        py::arg("alphas") = std::vector<double>{0.05}, py::arg("grid") = std::vector<double>{},
        py::arg("delta") = 0.0, py::arg("lambda0") = 0.5, py::arg("duration") = py::none(),
        py::arg("replications") = 5000, py::arg("seed") = 20240601, py::arg("threads") = 0,
        py::arg("scheme") = "fixed", py::arg("loss") = "quadratic",
        "Monte Carlo rejection rates; one row per statistic, alpha and delta.");

    m.def("preset_names", &preset_names);
    m.def(
        "reproduce",
        [](const std::string& preset, const std::filesystem::path& out_dir, std::size_t replications,
           std::uint64_t seed, std::size_t threads) {
            py::gil_scoped_release release;
            return cmd_reproduce(preset, out_dir, replications, seed, threads);
        },
        py::arg("preset"), py::arg("out_dir"), py::arg("replications") = 5000, py::arg("seed") = 20240601,
        py::arg("threads") = 0, "Write a preset table; returns the table path.");
}
