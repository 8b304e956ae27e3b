#include <algorithm>
#include <cmath>
#include <numeric>

#include "tool_support.hpp"
#include "tsreason/detail/stats.hpp"
#include "tsreason/toolkit.hpp"

namespace tsr {

namespace {

using namespace toolsupport;

Observation series_info(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    Observation obs;
    obs.kind = ValueKind::Meta;
    obs.value = src.meta().to_json();
    return obs;
}

Observation datapoint_value(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const std::size_t pos = src.resolve(args.at("at").get<double>());
    return real_observation(xs[pos]);
}

Observation datarange_value(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const auto [lo, hi] = window(src, args);
    const std::string stat = choice(args, "stat", "mean");
    std::span<const double> seg(xs.begin() + lo, xs.begin() + hi);
    double value = 0.0;
    if (stat == "mean")
        value = detail::mean(seg);
    else if (stat == "sum")
        value = std::accumulate(seg.begin(), seg.end(), 0.0);
    else if (stat == "max")
        value = detail::max_value(seg);
    else
        value = detail::min_value(seg);
    Observation obs = real_observation(value);
    obs.diagnostics = Json{{"start", lo}, {"end", hi}, {"stat", stat}};
    return obs;
}

Observation summary_stats(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const auto [lo, hi] = window(src, args);
    std::span<const double> seg(xs.begin() + lo, xs.begin() + hi);
    if (seg.size() < 2)
        throw ToolError("summary statistics need at least 2 points (std undefined on 1)");
    Observation obs;
    obs.kind = ValueKind::Meta;
    obs.value = Json{{"mean", detail::mean(seg)},
                     {"std", detail::sample_std(seg)},
                     {"min", detail::min_value(seg)},
                     {"max", detail::max_value(seg)}};
    obs.diagnostics = Json{{"start", lo}, {"end", hi}};
    return obs;
}

Observation return_calc(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const std::size_t p1 = src.resolve(args.at("t1").get<double>());
    const std::size_t p2 = src.resolve(args.at("t2").get<double>());
    const std::string kind = choice(args, "kind", "pct");
    const double v1 = xs[p1];
    const double v2 = xs[p2];
    if (kind == "diff") return real_observation(v2 - v1);
    if (v1 == 0.0) throw ToolError("percentage return undefined: value at t1 is 0");
    return real_observation((v2 - v1) / v1);
}

Observation autocorr(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const auto lag = args.at("lag").get<std::int64_t>();
    if (lag < 0 || static_cast<std::size_t>(lag) >= xs.size())
        throw ToolError("lag must satisfy 0 <= lag < T (T=" + std::to_string(xs.size()) + ")");
    return real_observation(detail::autocorrelation(xs, static_cast<std::size_t>(lag)));
}

Observation rolling_stat(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const std::string stat = choice(args, "stat", "mean");
    const auto window = args.at("window").get<std::int64_t>();
    const auto step = opt_int(args, "step").value_or(1);
    const double q = opt_number(args, "q").value_or(0.5);
    if (window < 1) throw ToolError("window must be >= 1");
    if (step < 1) throw ToolError("step must be >= 1");
    const auto w = static_cast<std::size_t>(window);
    if (w > xs.size())
        throw ToolError("window " + std::to_string(w) + " is longer than the series (" +
                        std::to_string(xs.size()) + " points)");
    if (stat == "std" && w < 2) throw ToolError("rolling std needs window >= 2");

    std::vector<double> out;
    std::vector<double> index;
    for (std::size_t lo = 0; lo + w <= xs.size(); lo += static_cast<std::size_t>(step)) {
        std::span<const double> seg(xs.begin() + lo, xs.begin() + lo + w);
        double v = 0.0;
        if (stat == "mean")
            v = detail::mean(seg);
        else if (stat == "std")
            v = detail::sample_std(seg);
        else
            v = detail::quantile(seg, q);
        out.push_back(v);
        index.push_back(src.index()[lo]);
    }
    TimeSeries derived(src.name(), std::move(index), {stat}, {std::move(out)},
                       std::nullopt);
    auto obs = series_observation(ctx, std::move(derived), src.name(), "rolling_" + stat);
    obs.diagnostics = Json{{"window", w}, {"step", step}};
    return obs;
}

Observation quantile_value(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const double q = args.at("q").get<double>();
    if (!(q > 0.0 && q < 1.0)) throw ToolError("q must lie strictly between 0 and 1");
    return real_observation(detail::quantile(xs, q));
}

Observation volatility(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const auto window = args.at("window").get<std::int64_t>();
    if (window < 2) throw ToolError("volatility window must be >= 2");
    const auto dx = detail::diff(xs);
    const auto w = static_cast<std::size_t>(window);
    if (dx.size() < w)
        throw ToolError("window " + std::to_string(w) +
                        " is longer than the difference series (" + std::to_string(dx.size()) +
                        " points)");
    std::vector<double> out;
    std::vector<double> index;
    for (std::size_t lo = 0; lo + w <= dx.size(); ++lo) {
        std::span<const double> seg(dx.begin() + lo, dx.begin() + lo + w);
        out.push_back(detail::sample_std(seg));
        index.push_back(src.index()[lo]);
    }
    TimeSeries derived(src.name(), std::move(index), {"volatility"}, {std::move(out)},
                       std::nullopt);
    auto obs = series_observation(ctx, std::move(derived), src.name(), "volatility");
    obs.diagnostics = Json{{"window", w}};
    return obs;
}

}  // namespace

void register_numeric_tools(Toolkit& kit) {
    kit.add({"series_info",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}}},
             ValueKind::Meta,
             "Return basic metadata: length, dimension, channels, sampling interval, missing "
             "counts."},
            series_info);
    kit.add({"datapoint_value",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}}, {"at", ParamType::Number, true, {}}},
             ValueKind::Real, "Return the value at a position or timestamp."},
            datapoint_value);
    kit.add({"datarange_value",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}},
              {"start", ParamType::Number, true, {}},
              {"end", ParamType::Number, true, {}},
              {"stat", ParamType::Choice, false, {"mean", "sum", "max", "min"}}},
             ValueKind::Real,
             "Compute mean/sum/max/min over the window [start, end)."},
            datarange_value);
    kit.add({"summary_stats",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}},
              {"start", ParamType::Number, false, {}},
              {"end", ParamType::Number, false, {}}},
             ValueKind::Meta, "Mean, std, min, max, optionally over a window."},
            summary_stats);
    kit.add({"return_calc",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}},
              {"t1", ParamType::Number, true, {}},
              {"t2", ParamType::Number, true, {}},
              {"kind", ParamType::Choice, false, {"pct", "diff"}}},
             ValueKind::Real, "Simple or percentage return between two times."},
            return_calc);
    kit.add({"autocorr",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}}, {"lag", ParamType::Integer, true, {}}},
             ValueKind::Real, "Autocorrelation at the given lag."},
            autocorr);
    kit.add({"rolling_stat",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}},
              {"stat", ParamType::Choice, true, {"mean", "std", "quantile"}},
              {"window", ParamType::Integer, true, {}},
              {"step", ParamType::Integer, false, {}},
              {"q", ParamType::Number, false, {}}},
             ValueKind::Series,
             "Rolling mean/std/quantile over start-aligned windows with an optional step."},
            rolling_stat);
    kit.add({"quantile_value",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}}, {"q", ParamType::Number, true, {}}},
             ValueKind::Real,
             "Empirical quantile at level q in (0,1), linearly interpolated."},
            quantile_value);
    kit.add({"volatility",
             ToolFamily::Numeric,
             {{"name", ParamType::Series, true, {}}, {"window", ParamType::Integer, true, {}}},
             ValueKind::Series, "Windowed volatility: rolling std of first differences."},
            volatility);
}

}  // namespace tsr
