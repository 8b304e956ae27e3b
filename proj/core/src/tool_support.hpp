#pragma once

// Internal helpers shared by the tool implementation files.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsreason/series.hpp"
#include "tsreason/toolkit.hpp"

namespace tsr::toolsupport {

inline std::string series_arg(const Json& args, const char* key,
                              const char* multi_error = nullptr) {
    const auto& val = args.at(key);
    if (val.is_array()) {
        if (val.size() == 1) return val.at(0).get<std::string>();
        if (multi_error) throw ToolError(multi_error);
        throw ToolError("argument \"" + std::string(key) + "\" must name a single series, got " +
                        std::to_string(val.size()));
    }
    return val.get<std::string>();
}

/// Fetch a series that must be univariate and gap-free. `flat_error` is the
/// message for multivariate misuse ("x must be 1-D" for the anomaly tools).
inline std::span<const double> univariate_values(const TimeSeries& series,
                                                 const char* flat_error = nullptr) {
    if (!series.is_univariate() && flat_error) throw ToolError(flat_error);
    auto vals = series.values();  // throws a channel-listing error if multivariate
    for (double v : vals) {
        if (std::isnan(v))
            throw ToolError("series \"" + series.name() +
                            "\" contains missing values; tools do not impute");
    }
    return vals;
}

inline const TimeSeries& fetch(ToolContext& ctx, const Json& args, const char* key,
                               const char* multi_error = nullptr) {
    return ctx.store.get(series_arg(args, key, multi_error));
}

inline std::optional<double> opt_number(const Json& args, const char* key) {
    if (!args.contains(key)) return std::nullopt;
    return args.at(key).get<double>();
}

inline std::optional<std::int64_t> opt_int(const Json& args, const char* key) {
    if (!args.contains(key)) return std::nullopt;
    return args.at(key).get<std::int64_t>();
}

inline std::string choice(const Json& args, const char* key, const std::string& fallback) {
    if (!args.contains(key)) return fallback;
    return args.at(key).get<std::string>();
}

/// Resolve an optional [start, end) window onto positions. Defaults to the
/// full range. Start is inclusive, end exclusive (an exact index match or an
/// integral position).
inline std::pair<std::size_t, std::size_t> window(const TimeSeries& series, const Json& args,
                                                  const char* start_key = "start",
                                                  const char* end_key = "end") {
    std::size_t lo = 0;
    std::size_t hi = series.length();
    if (args.contains(start_key)) lo = series.resolve(args.at(start_key).get<double>());
    if (args.contains(end_key)) {
        const double raw = args.at(end_key).get<double>();
        if (raw == static_cast<double>(series.length()))
            hi = series.length();
        else
            hi = series.resolve(raw);
    }
    if (lo > hi) throw ToolError("window start is after window end");
    if (lo == hi) throw ToolError("window is empty");
    return {lo, hi};
}

inline Observation series_observation(ToolContext& ctx, TimeSeries derived,
                                      const std::string& base, const std::string& op) {
    const std::size_t len = derived.length();
    const std::size_t dim = derived.dim();
    const std::string name = ctx.store.put_derived(std::move(derived), base, op);
    Observation obs;
    obs.kind = ValueKind::Series;
    obs.value = Json{{"name", name}, {"length", len}, {"dim", dim}};
    return obs;
}

inline Observation real_observation(double value) {
    Observation obs;
    obs.kind = ValueKind::Real;
    obs.value = value;
    return obs;
}

inline Observation category_observation(const std::string& label, Json diagnostics) {
    Observation obs;
    obs.kind = ValueKind::Category;
    obs.value = label;
    obs.diagnostics = std::move(diagnostics);
    return obs;
}

inline Observation index_set_observation(const std::vector<std::size_t>& indices,
                                         Json diagnostics) {
    Observation obs;
    obs.kind = ValueKind::IndexSet;
    obs.value = Json::array();
    for (auto i : indices) obs.value.push_back(i);
    obs.diagnostics = std::move(diagnostics);
    return obs;
}

}  // namespace tsr::toolsupport
