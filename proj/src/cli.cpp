#include "fbreak/cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fbreak/error.hpp"

namespace fbreak {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& v) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

template <class T>
bool parse_unsigned(std::string_view s, T& v) {
    s = trim(s);
    if (s.empty()) return false;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

std::string setting_text(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw Error(Errc::InvalidArgument, "setting '" + key + "' must be a scalar");
}

double as_double(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    double d = 0.0;
    if (!parse_double(setting_text(v, key), d))
        throw Error(Errc::InvalidArgument, "setting '" + key + "' is not a number");
    return d;
}

std::uint64_t as_u64(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    std::uint64_t u = 0;
    if (!parse_unsigned(setting_text(v, key), u))
        throw Error(Errc::InvalidArgument, "setting '" + key + "' is not a nonnegative integer");
    return u;
}

std::size_t as_size(const json& v, const std::string& key) {
    return static_cast<std::size_t>(as_u64(v, key));
}

std::vector<std::string> as_string_list(const json& v, const std::string& key) {
    std::vector<std::string> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(setting_text(e, key));
    } else {
        for (auto part : split(setting_text(v, key), ','))
            if (!part.empty()) out.emplace_back(part);
    }
    return out;
}

std::vector<double> as_double_list(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(as_double(e, key));
        return out;
    }
    for (const auto& s : as_string_list(v, key)) out.push_back(as_double(json(s), key));
    return out;
}

std::string canonical_key(std::string key) {
    for (auto& c : key)
        if (c == '_') c = '-';
    return key;
}

} // namespace

std::string_view to_string(Mode m) noexcept {
    switch (m) {
    case Mode::Test: return "test";
    case Mode::Simulate: return "simulate";
    case Mode::Reproduce: return "reproduce";
    }
    return "test";
}

Mode mode_from_string(std::string_view name) {
    if (name == "test") return Mode::Test;
    if (name == "simulate") return Mode::Simulate;
    if (name == "reproduce") return Mode::Reproduce;
    throw Error(Errc::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

StatisticChoice parse_statistic(std::string_view text, VarianceKind default_variance) {
    text = trim(text);
    std::string_view name = text;
    std::string_view var;
    if (const auto lb = text.find('['); lb != std::string_view::npos) {
        if (text.back() != ']') throw Error(Errc::InvalidArgument, "malformed statistic '" + std::string(text) + "'");
        name = text.substr(0, lb);
        var = text.substr(lb + 1, text.size() - lb - 2);
    } else if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        name = text.substr(0, colon);
        var = text.substr(colon + 1);
    }
    StatisticChoice c;
    c.kind = statistic_from_string(trim(name));
    c.variance = var.empty() ? default_variance : variance_from_string(trim(var));
    if (!needs_variance(c.kind)) c.variance = VarianceKind::None;
    return c;
}

std::vector<StatisticChoice> CliConfig::resolved_statistics() const {
    std::vector<StatisticChoice> out =
        statistics.empty() ? std::vector<StatisticChoice>{{StatisticKind::Qmax, VarianceKind::None}}
                           : statistics;
    for (auto& s : out) {
        if (!needs_variance(s.kind))
            s.variance = VarianceKind::None;
        else if (s.variance == VarianceKind::None)
            s.variance = variance;
    }
    return out;
}

void CliConfig::validate() const {
    if (mode == Mode::Test && !input_path)
        throw Error(Errc::InvalidArgument, "test mode requires --input");
    if (mode != Mode::Test && !config_path && !preset)
        throw Error(Errc::InvalidArgument,
                    std::string(to_string(mode)) + " mode requires --config or --preset");
    if (alphas.empty()) throw Error(Errc::InvalidArgument, "at least one alpha is required");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0,1)");
    block_rule.validate();
    loss.validate();
}

void apply_settings(CliConfig& cfg, std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::InvalidArgument, "config must be a JSON object");
    for (const auto& [raw_key, v] : j.items()) {
        const std::string key = canonical_key(raw_key);
        if (key == "mode") cfg.mode = mode_from_string(setting_text(v, key));
        else if (key == "input") cfg.input_path = setting_text(v, key);
        else if (key == "config") cfg.config_path = setting_text(v, key);
        else if (key == "out") cfg.output_dir = setting_text(v, key);
        else if (key == "preset") cfg.preset = setting_text(v, key);
        else if (key == "scheme") cfg.scheme = scheme_from_string(setting_text(v, key));
        else if (key == "loss") {
            const double a1 = cfg.loss.a1, a2 = cfg.loss.a2;
            cfg.loss = loss_from_string(setting_text(v, key));
            if (cfg.loss.kind == LossFunction::Kind::Linex) cfg.loss = LossFunction::linex(a1, a2);
        } else if (key == "linex-a1") cfg.loss.a1 = as_double(v, key);
        else if (key == "linex-a2") cfg.loss.a2 = as_double(v, key);
        else if (key == "stat") {
            cfg.statistics.clear();
            for (const auto& s : as_string_list(v, key))
                cfg.statistics.push_back(parse_statistic(s, VarianceKind::None));
        } else if (key == "variance") cfg.variance = variance_from_string(setting_text(v, key));
        else if (key == "alpha") cfg.alphas = as_double_list(v, key);
        else if (key == "tm") cfg.in_sample = as_size(v, key);
        else if (key == "tau") cfg.horizon = as_size(v, key);
        else if (key == "block-rule") cfg.block_rule.regime = regime_from_string(setting_text(v, key));
        else if (key == "epsilon") cfg.block_rule.epsilon = as_double(v, key);
        else if (key == "reps") cfg.replications = as_size(v, key);
        else if (key == "seed") cfg.seed = as_u64(v, key);
        else if (key == "threads") cfg.threads = as_size(v, key);
        else if (key == "family") cfg.family = family_from_string(setting_text(v, key));
        else if (key == "T" || key == "t") cfg.total_obs = as_size(v, key);
        else if (key == "delta") cfg.delta = as_double(v, key);
        else if (key == "grid") cfg.grid = as_double_list(v, key);
        else if (key == "lambda0") cfg.lambda0 = as_double(v, key);
        else if (key == "p") {
            if (v.is_null() || (v.is_string() && (v == "inf" || v == "")))
                cfg.duration.reset();
            else
                cfg.duration = as_size(v, key);
        } else if (key == "switch-period") cfg.switch_period = as_size(v, key);
        else throw Error(Errc::InvalidArgument, "unknown setting '" + raw_key + "'");
    }
}

DataSet parse_csv(std::string_view text) {
    DataSet data;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t y_col = 0;
    std::vector<std::size_t> x_cols;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        const auto cells = split(line, ',');
        if (!have_header) {
            have_header = true;
            bool found_y = false;
            std::vector<std::pair<std::size_t, std::size_t>> xs;  // (index k of xk, column)
            for (std::size_t c = 0; c < cells.size(); ++c) {
                std::string name(cells[c]);
                if (name.size() >= 2 && name.front() == '"' && name.back() == '"')
                    name = name.substr(1, name.size() - 2);
                data.columns.push_back(name);
                std::size_t k = 0;
                if (name == "y") {
                    if (found_y) throw Error(Errc::MalformedCsv, "duplicate column 'y'");
                    found_y = true;
                    y_col = c;
                } else if (name.size() >= 2 && name[0] == 'x' &&
                           parse_unsigned(std::string_view(name).substr(1), k) && k >= 1) {
                    xs.emplace_back(k, c);
                } else {
                    throw Error(Errc::MalformedCsv, "line " + std::to_string(line_no) + ", column " +
                                                        std::to_string(c + 1) + ": unexpected header '" +
                                                        name + "' (expected y, x1..xq)");
                }
            }
            if (!found_y) throw Error(Errc::MalformedCsv, "header has no 'y' column");
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (xs[i].first != i + 1)
                    throw Error(Errc::MalformedCsv, "predictor columns must be x1..xq without gaps");
                x_cols.push_back(xs[i].second);
            }
        } else {
            if (cells.size() != data.columns.size())
                throw Error(Errc::MalformedCsv, "line " + std::to_string(line_no) + ": expected " +
                                                    std::to_string(data.columns.size()) + " cells, found " +
                                                    std::to_string(cells.size()));
            std::vector<double> row(cells.size());
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (!parse_double(cells[c], row[c]) || !std::isfinite(row[c]))
                    throw Error(Errc::MalformedCsv, "line " + std::to_string(line_no) + ", column " +
                                                        std::to_string(c + 1) + " ('" + data.columns[c] +
                                                        "'): not a finite number: '" +
                                                        std::string(cells[c]) + "'");
            }
            rows.push_back(std::move(row));
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw Error(Errc::MalformedCsv, "missing header row");

    data.path.y.resize(rows.size());
    data.path.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(x_cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.path.y[i] = rows[i][y_col];
        for (std::size_t k = 0; k < x_cols.size(); ++k)
            data.path.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][x_cols[k]];
    }
    return data;
}

DataSet read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

TestRun run_data_test(const DataSet& data, const CliConfig& cfg) {
    const std::size_t T = data.path.size();
    const std::size_t tm = cfg.in_sample.value_or(T / 2);
    TestRun run;
    run.design = SampleDesign::make(T, tm, cfg.horizon, cfg.scheme);
    run.partition = select_block_size(run.design, cfg.block_rule);
    const auto losses = forecast_losses(data.path, run.design, cfg.loss, true);
    for (const auto& stat : cfg.resolved_statistics()) {
        for (double alpha : cfg.alphas) {
            auto r = run_test(losses, run.partition, stat.kind, stat.variance, alpha, &run.design);
            run.any_reject = run.any_reject || r.reject;
            run.reports.push_back(r);
        }
    }
    return run;
}

std::string test_report_json(const TestRun& run, const CliConfig& cfg) {
    json j;
    j["schema_version"] = kSummarySchemaVersion;
    j["version"] = std::string(kVersion);
    j["T"] = run.design.total_obs;
    j["T_m"] = run.design.in_sample;
    j["T_n"] = run.design.out_sample;
    j["tau"] = run.design.horizon;
    j["scheme"] = std::string(to_string(run.design.scheme));
    j["loss"] = cfg.loss.name();
    j["block_rule"] = std::string(to_string(cfg.block_rule.regime));
    j["epsilon"] = cfg.block_rule.epsilon;
    j["n_T"] = run.partition.block_len;
    j["m_T"] = run.partition.n_blocks;
    j["any_reject"] = run.any_reject;
    json reports = json::array();
    for (const auto& r : run.reports) {
        json e{{"statistic", std::string(to_string(r.statistic_kind))},
               {"variance_estimator", std::string(to_string(r.variance_estimator_used))},
               {"raw", r.raw},
               {"transformed", r.transformed},
               {"critical_value", r.critical_value},
               {"p_value", r.p_value},
               {"reject", r.reject},
               {"alpha", r.alpha}};
        e["variance_value"] = r.variance_value ? json(*r.variance_value) : json(nullptr);
        reports.push_back(std::move(e));
    }
    j["reports"] = std::move(reports);
    return j.dump(2);
}

void print_test_report(std::ostream& os, const TestRun& run) {
    os << "T=" << run.design.total_obs << " T_m=" << run.design.in_sample
       << " T_n=" << run.design.out_sample << " scheme=" << to_string(run.design.scheme)
       << " n_T=" << run.partition.block_len << " m_T=" << run.partition.n_blocks << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %-6s %6s %12s %10s %10s  %s\n", "stat", "var", "alpha",
                  "statistic", "crit", "p-value", "decision");
    os << line;
    for (const auto& r : run.reports) {
        const std::string var =
            needs_variance(r.statistic_kind) ? std::string(to_string(r.variance_estimator_used)) : "-";
        std::snprintf(line, sizeof line, "%-8s %-6s %6.3f %12.4f %10.4f %10.4f  %s\n",
                      std::string(to_string(r.statistic_kind)).c_str(), var.c_str(), r.alpha,
                      r.transformed, r.critical_value, r.p_value, r.reject ? "reject" : "no rejection");
        os << line;
    }
}

ExperimentSpec experiment_from_config(const CliConfig& cfg) {
    ExperimentSpec spec;
    spec.dgp.family = cfg.family;
    spec.dgp.delta = cfg.delta;
    spec.dgp.lambda0 = cfg.lambda0;
    spec.dgp.duration = cfg.duration;
    spec.dgp.switch_period = cfg.switch_period;
    spec.design = SampleDesign::make(cfg.total_obs, cfg.in_sample.value_or(cfg.total_obs / 2),
                                     cfg.horizon, cfg.scheme);
    spec.block_rule = cfg.block_rule;
    spec.loss = cfg.loss;
    spec.statistics = cfg.resolved_statistics();
    spec.alphas = cfg.alphas;
    spec.replications = cfg.replications;
    spec.base_seed = cfg.seed;
    spec.grid = cfg.grid;
    spec.threads = cfg.threads;
    return spec;
}

// ---- presets ----

namespace {

using Stats = std::vector<StatisticChoice>;

Stats local_scale_stats() {
    return {{StatisticKind::GRt, VarianceKind::None},
            {StatisticKind::Bmax, VarianceKind::None},
            {StatisticKind::Qmax, VarianceKind::Q1},
            {StatisticKind::MBmax, VarianceKind::None},
            {StatisticKind::MQmax, VarianceKind::MQ1}};
}

Stats long_run_stats() {
    return {{StatisticKind::GRt, VarianceKind::None},
            {StatisticKind::Bmax, VarianceKind::None},
            {StatisticKind::Qmax, VarianceKind::NuL},
            {StatisticKind::MBmax, VarianceKind::None},
            {StatisticKind::MQmax, VarianceKind::NuL}};
}

struct Context {
    std::size_t reps;
    std::uint64_t seed;
    std::size_t threads;
};

ExperimentSpec make_run(const Context& ctx, Family family, std::size_t T, std::size_t tm,
                        Scheme scheme, Stats stats, std::vector<double> alphas) {
    ExperimentSpec s;
    s.dgp.family = family;
    s.design = SampleDesign::make(T, tm, 1, scheme);
    s.statistics = std::move(stats);
    s.alphas = std::move(alphas);
    s.replications = ctx.reps;
    s.base_seed = ctx.seed;
    s.threads = ctx.threads;
    return s;
}

// The twelve (T, T_m) rows of the size tables.
std::vector<ExperimentSpec> size_table(const Context& ctx, Family family, Scheme scheme, Stats stats,
                                       LossFunction loss = LossFunction::quadratic()) {
    std::vector<ExperimentSpec> runs;
    for (std::size_t T : {100, 200, 300, 400})
        for (std::size_t q : {1, 2, 3}) {
            auto s = make_run(ctx, family, T, T * q / 4, scheme, stats, {0.05, 0.10});
            s.loss = loss;
            runs.push_back(std::move(s));
        }
    return runs;
}

std::vector<ExperimentSpec> p1_power_table(const Context& ctx, Scheme scheme, bool short_term) {
    std::vector<ExperimentSpec> runs;
    for (std::size_t T : {100, 200, 300, 400}) {
        auto s = make_run(ctx, Family::P1a, T, T / 2, scheme, local_scale_stats(), {0.05});
        s.dgp.lambda0 = 0.6;
        if (short_term) s.dgp.duration = 20;
        s.grid = {0.5, 1.0, 1.5, 2.0};
        runs.push_back(std::move(s));
    }
    return runs;
}

struct FigureGroup {
    std::vector<std::pair<std::size_t, std::size_t>> sizes;  // (T, p); p = 0 permanent
    std::vector<double> lambdas;
};

std::vector<double> figure_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 8; ++i) g.push_back(0.25 * i);
    return g;
}

// tm_frac <= 0 sets T_m = T * lambda0 (recurrent designs).
std::vector<ExperimentSpec> figure(const Context& ctx, Family family,
                                   const std::vector<FigureGroup>& groups, double tm_frac,
                                   Stats stats, bool recurrent = false) {
    std::vector<ExperimentSpec> runs;
    for (const auto& g : groups)
        for (const auto& [T, p] : g.sizes)
            for (double lambda : g.lambdas) {
                const double frac = tm_frac > 0.0 ? tm_frac : lambda;
                const auto tm = static_cast<std::size_t>(std::floor(double(T) * frac + 1e-9));
                auto s = make_run(ctx, family, T, tm, Scheme::Fixed, stats, {0.05});
                s.dgp.lambda0 = lambda;
                if (recurrent)
                    s.dgp.switch_period = p;
                else if (p > 0)
                    s.dgp.duration = p;
                s.grid = figure_grid();
                runs.push_back(std::move(s));
            }
    return runs;
}

struct PresetDef {
    const char* name;
    const char* description;
    bool curve;
    std::vector<ExperimentSpec> (*build)(const Context&);
};

const std::vector<PresetDef>& preset_table() {
    static const std::vector<PresetDef> defs{
        {"table1", "Size, model S1, fixed scheme, quadratic loss", false,
         [](const Context& c) { return size_table(c, Family::S1, Scheme::Fixed, local_scale_stats()); }},
        {"table2", "Size, model S2 (ARCH errors), fixed scheme", false,
         [](const Context& c) { return size_table(c, Family::S2, Scheme::Fixed, long_run_stats()); }},
        {"tableS3", "Size, model S3 (autoregressive predictor), fixed scheme", false,
         [](const Context& c) { return size_table(c, Family::S3, Scheme::Fixed, local_scale_stats()); }},
        {"tableS4", "Size, model S4 (lagged dependent variable), fixed scheme", false,
         [](const Context& c) { return size_table(c, Family::S4, Scheme::Fixed, local_scale_stats()); }},
        {"tableS6", "Size, model S6 (autocorrelated errors), fixed scheme", false,
         [](const Context& c) { return size_table(c, Family::S6, Scheme::Fixed, long_run_stats()); }},
        {"table-recursive", "Size, model S1, recursive scheme", false,
         [](const Context& c) { return size_table(c, Family::S1, Scheme::Recursive, local_scale_stats()); }},
        {"table-rolling", "Size, model S1, rolling scheme", false,
         [](const Context& c) { return size_table(c, Family::S1, Scheme::Rolling, local_scale_stats()); }},
        {"table-linex", "Size, model S1, fixed scheme, linex loss", false,
         [](const Context& c) {
             return size_table(c, Family::S1, Scheme::Fixed, local_scale_stats(), LossFunction::linex());
         }},
        {"table-P1-recursive", "Power, model P1a, recursive scheme", false,
         [](const Context& c) { return p1_power_table(c, Scheme::Recursive, false); }},
        {"table-P1-recursive-st", "Power, model P1a short-term break, recursive scheme", false,
         [](const Context& c) { return p1_power_table(c, Scheme::Recursive, true); }},
        {"table-P1-rolling", "Power, model P1a, rolling scheme", false,
         [](const Context& c) { return p1_power_table(c, Scheme::Rolling, false); }},
        {"table-P1-rolling-st", "Power, model P1a short-term break, rolling scheme", false,
         [](const Context& c) { return p1_power_table(c, Scheme::Rolling, true); }},
        {"fig-P1a", "Power curves, model P1a", true,
         [](const Context& c) {
             return figure(c, Family::P1a, {{{{100, 0}, {150, 0}, {200, 0}, {300, 0}}, {0.7, 0.8}}}, 0.4,
                           local_scale_stats());
         }},
        {"fig-P1a-st", "Power curves, model P1a with short-term instability", true,
         [](const Context& c) {
             return figure(c, Family::P1a, {{{{100, 20}, {150, 25}, {200, 20}, {300, 30}}, {0.7, 0.8}}},
                           0.4, local_scale_stats());
         }},
        {"fig-P1b", "Power curves, model P1b", true,
         [](const Context& c) {
             return figure(c, Family::P1b, {{{{100, 0}, {150, 0}, {200, 0}, {300, 0}}, {0.7, 0.8}}}, 0.4,
                           local_scale_stats());
         }},
        {"fig-P2", "Power curves, model P2", true,
         [](const Context& c) {
             return figure(c, Family::P2, {{{{100, 0}, {200, 0}}, {0.7, 0.8}}}, 0.4, local_scale_stats());
         }},
        {"fig-P3", "Power curves, model P3 (recurrent mean)", true,
         [](const Context& c) {
             return figure(c, Family::P3, {{{{200, 30}, {300, 40}}, {0.5, 0.6}}}, 0.0, local_scale_stats(),
                           true);
         }},
        {"fig-P4", "Power curves, model P4 (variance break)", true,
         [](const Context& c) {
             return figure(c, Family::P4,
                           {{{{200, 0}, {300, 0}}, {0.6, 0.8}}, {{{400, 0}, {500, 0}}, {0.8, 0.9}}}, 0.3,
                           local_scale_stats());
         }},
        {"fig-P4-st", "Power curves, model P4 with short-term instability", true,
         [](const Context& c) {
             return figure(c, Family::P4, {{{{200, 30}, {300, 30}, {400, 30}, {500, 30}}, {0.6, 0.8}}},
                           0.3, local_scale_stats());
         }},
        {"fig-P5", "Power curves, model P5 (recurrent variance)", true,
         [](const Context& c) {
             return figure(c, Family::P5, {{{{200, 30}, {300, 40}}, {0.5, 0.6, 0.7, 0.8}}}, 0.0,
                           local_scale_stats(), true);
         }},
        {"fig-P6", "Power curves, model P6 (lagged dependent variable)", true,
         [](const Context& c) {
             return figure(c, Family::P6, {{{{200, 0}, {300, 0}}, {0.7, 0.8}}}, 0.4, local_scale_stats());
         }},
        {"fig-P7", "Power curves, model P7 (ARCH errors)", true,
         [](const Context& c) {
             return figure(c, Family::P7, {{{{200, 0}, {300, 0}}, {0.7, 0.8}}}, 0.5, long_run_stats());
         }},
        {"fig-P8", "Power curves, model P8 (autocorrelated errors)", true,
         [](const Context& c) {
             return figure(c, Family::P8, {{{{200, 0}, {300, 0}}, {0.7, 0.8}}}, 0.5, long_run_stats());
         }},
    };
    return defs;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += v[i];
    }
    return s;
}

std::string p_text(const DgpSpec& d) {
    if (d.duration) return std::to_string(*d.duration);
    if (d.family == Family::P3 || d.family == Family::P5) return std::to_string(d.switch_period);
    return "inf";
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& d : preset_table()) out.emplace_back(d.name);
    return out;
}

Preset make_preset(std::string_view name, std::size_t replications, std::uint64_t seed,
                   std::size_t threads) {
    for (const auto& d : preset_table()) {
        if (name != d.name) continue;
        Preset p;
        p.name = d.name;
        p.description = d.description;
        p.curve = d.curve;
        p.runs = d.build(Context{replications, seed, threads});
        return p;
    }
    throw Error(Errc::UnknownPreset,
                "'" + std::string(name) + "'; valid presets: " + join(preset_names(), ", "));
}

PresetOutput run_preset(const Preset& preset) {
    if (preset.runs.empty()) throw Error(Errc::InvalidArgument, "preset has no runs");
    const auto& first = preset.runs.front();
    const bool power = std::any_of(preset.runs.begin(), preset.runs.end(),
                                   [](const ExperimentSpec& s) { return !s.grid.empty(); });

    std::ostringstream wide, longf;
    write_csv_header(longf);
    wide << "family,T,T_m,T_n,scheme,loss";
    if (power) wide << ",delta,lambda0,p";
    for (double a : first.alphas)
        for (const auto& s : first.statistics) wide << ',' << s.label() << '@' << fmt("%.4g", a);
    wide << '\n';

    PresetOutput out;
    for (const auto& spec : preset.runs) {
        const auto result = power_curve(spec);
        out.runtime_seconds += result.runtime_seconds;
        write_csv_rows(longf, spec, result);
        const auto deltas = spec.grid.empty() ? std::vector<double>{spec.dgp.delta} : spec.grid;
        for (double delta : deltas) {
            const auto& d = spec.design;
            wide << to_string(spec.dgp.family) << ',' << d.total_obs << ',' << d.in_sample << ','
                 << d.out_sample << ',' << to_string(d.scheme) << ',' << spec.loss.name();
            if (power)
                wide << ',' << fmt("%.6g", delta) << ',' << fmt("%.4g", spec.dgp.lambda0) << ','
                     << p_text(spec.dgp);
            for (double a : spec.alphas)
                for (const auto& s : spec.statistics)
                    wide << ',' << fmt("%.4f", result.at(s, a, delta).rejection_rate);
            wide << '\n';
        }
    }
    out.long_csv = longf.str();
    out.table_csv = preset.curve ? out.long_csv : wide.str();

    json m;
    m["schema_version"] = kSummarySchemaVersion;
    m["preset"] = preset.name;
    m["description"] = preset.description;
    m["version"] = std::string(kVersion);
    m["seed"] = first.base_seed;
    m["replications"] = first.replications;
    m["runs"] = preset.runs.size();
    json stats = json::array();
    for (const auto& s : first.statistics) stats.push_back(s.label());
    m["statistics"] = std::move(stats);
    m["files"] = {preset.name + ".csv", preset.name + "_long.csv"};
    out.manifest_json = m.dump(2);
    return out;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::InvalidArgument, "cannot write '" + path.string() + "'");
    f << content;
}

} // namespace

fs::path cmd_reproduce(std::string_view preset, const fs::path& out_dir, std::size_t replications,
                       std::uint64_t seed, std::size_t threads) {
    const auto p = make_preset(preset, replications, seed, threads);
    const auto out = run_preset(p);
    fs::create_directories(out_dir);
    const auto table = out_dir / (p.name + ".csv");
    write_file(table, out.table_csv);
    write_file(out_dir / (p.name + "_long.csv"), out.long_csv);
    write_file(out_dir / (p.name + "_manifest.json"), out.manifest_json);
    return table;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forecast instability tests: run on data, simulate, or reproduce experiments",
                 "fbreak"};
    struct Flag {
        const char* name;
        const char* help;
        std::string value;
    };
    std::vector<Flag> flags{
        {"--mode", "test | simulate | reproduce", {}},
        {"--input", "CSV with header y,x1..xq (test mode)", {}},
        {"--config", "JSON settings file; flags override it", {}},
        {"--out", "output directory", {}},
        {"--preset", "named experiment (simulate/reproduce)", {}},
        {"--scheme", "fixed | recursive | rolling", {}},
        {"--loss", "quadratic | linex | absolute", {}},
        {"--variance", "q1 | mq1 | nu2 | nu3 | nu4 | nuL", {}},
        {"--alpha", "significance level(s), comma separated", {}},
        {"--tm", "in-sample size T_m", {}},
        {"--tau", "forecast horizon", {}},
        {"--block-rule", "lipschitz | ito", {}},
        {"--epsilon", "block-length exponent slack", {}},
        {"--reps", "Monte Carlo replications", {}},
        {"--seed", "base seed (FB_SEED overrides)", {}},
        {"--threads", "worker threads (0 = all cores)", {}},
        {"--family", "DGP family for simulate mode", {}},
        {"--T", "sample size for simulate mode", {}},
        {"--delta", "break magnitude for simulate mode", {}},
        {"--grid", "comma-separated delta grid for simulate mode", {}},
        {"--lambda0", "break fraction for simulate mode", {}},
        {"--p", "instability duration for simulate mode", {}},
    };
    for (auto& f : flags) app.add_option(f.name, f.value, f.help);
    std::vector<std::string> stats;
    app.add_option("--stat", stats, "statistic, repeatable (e.g. Qmax, MQmax[nu2], tstat)");
    bool list = false;
    app.add_flag("--list-presets", list, "print preset names and exit");
    bool version = false;
    app.add_flag("--version", version, "print version and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }
    if (version) {
        out << "fbreak " << kVersion << '\n';
        return 0;
    }
    if (list) {
        for (const auto& n : preset_names()) out << n << '\n';
        return 0;
    }

    try {
        CliConfig cfg;
        json overrides = json::object();
        for (const auto& f : flags) {
            if (app.count(f.name) == 0) continue;
            overrides[std::string(f.name + 2)] = f.value;
        }
        if (!stats.empty()) overrides["stat"] = stats;
        if (overrides.contains("config")) {
            const fs::path cpath = overrides["config"].get<std::string>();
            std::ifstream in(cpath);
            if (!in) throw Error(Errc::InvalidArgument, "cannot open config '" + cpath.string() + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            apply_settings(cfg, ss.str());
            cfg.config_path = cpath;
        }
        apply_settings(cfg, overrides.dump());
        if (const char* env = std::getenv("FB_SEED"); env && *env) {
            std::uint64_t s = 0;
            if (!parse_unsigned(std::string_view(env), s))
                throw Error(Errc::InvalidArgument, "FB_SEED must be a nonnegative integer");
            cfg.seed = s;
        }
        if (cfg.mode == Mode::Reproduce && !cfg.preset)
            throw Error(Errc::InvalidArgument, "reproduce mode requires a preset");
        cfg.validate();

        switch (cfg.mode) {
        case Mode::Test: {
            const auto data = read_csv(*cfg.input_path);
            const auto run = run_data_test(data, cfg);
            print_test_report(out, run);
            fs::create_directories(cfg.output_dir);
            write_file(cfg.output_dir / "test_report.json", test_report_json(run, cfg));
            return run.any_reject ? 1 : 0;
        }
        case Mode::Simulate:
        case Mode::Reproduce: {
            if (cfg.preset) {
                const auto table =
                    cmd_reproduce(*cfg.preset, cfg.output_dir, cfg.replications, cfg.seed, cfg.threads);
                out << "wrote " << table.string() << '\n';
                return 0;
            }
            const auto spec = experiment_from_config(cfg);
            const auto result = power_curve(spec);
            fs::create_directories(cfg.output_dir);
            std::ostringstream csv;
            write_csv(csv, spec, result);
            write_file(cfg.output_dir / "simulate.csv", csv.str());
            write_file(cfg.output_dir / "simulate_summary.json", summary_json(spec, result));
            out << csv.str();
            return 0;
        }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace fbreak
