#include <algorithm>
#include <cmath>

#include "tool_support.hpp"
#include "tsreason/detail/stats.hpp"
#include "tsreason/toolkit.hpp"

namespace tsr {

namespace {

using namespace toolsupport;

TimeSeries window_view(const TimeSeries& src, std::size_t lo, std::size_t hi) {
    std::vector<double> index(src.index().begin() + lo, src.index().begin() + hi);
    std::vector<std::vector<double>> values;
    values.reserve(src.dim());
    for (std::size_t c = 0; c < src.dim(); ++c) {
        auto row = src.channel_values(c);
        values.emplace_back(row.begin() + lo, row.begin() + hi);
    }
    std::optional<double> interval = hi - lo > 1 ? src.interval() : std::nullopt;
    return TimeSeries(src.name(), std::move(index), src.channels(), std::move(values), interval);
}

Observation slice_series(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    const double start = args.at("start").get<double>();
    const double end = args.at("end").get<double>();
    if (start > end) throw ToolError("slice start must not exceed end");
    const std::size_t lo = src.resolve(start);
    std::size_t hi = src.length();
    if (end != static_cast<double>(src.length())) hi = src.resolve(end);
    if (lo >= hi) throw ToolError("slice window is empty");
    return series_observation(ctx, window_view(src, lo, hi), src.name(), "slice");
}

Observation segment_series(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    const std::size_t T = src.length();
    std::vector<std::pair<std::size_t, std::size_t>> bounds;

    const bool has_k = args.contains("k");
    const bool has_lengths = args.contains("lengths");
    if (has_k == has_lengths)
        throw ToolError("segment_series needs exactly one of k or lengths");

    if (has_k) {
        const auto k = args.at("k").get<std::int64_t>();
        if (k < 1) throw ToolError("k must be >= 1");
        if (static_cast<std::size_t>(k) > T)
            throw ToolError("k = " + std::to_string(k) + " exceeds series length " +
                            std::to_string(T));
        const std::size_t base = T / static_cast<std::size_t>(k);
        std::size_t lo = 0;
        for (std::int64_t i = 0; i < k; ++i) {
            // the final segment absorbs the remainder
            const std::size_t hi = (i + 1 == k) ? T : lo + base;
            bounds.emplace_back(lo, hi);
            lo = hi;
        }
    } else {
        std::size_t total = 0;
        std::size_t lo = 0;
        for (const auto& item : args.at("lengths")) {
            const auto len = item.get<std::int64_t>();
            if (len < 1) throw ToolError("segment lengths must be positive");
            total += static_cast<std::size_t>(len);
            if (total > T) break;
            bounds.emplace_back(lo, lo + static_cast<std::size_t>(len));
            lo += static_cast<std::size_t>(len);
        }
        if (total != T)
            throw ToolError("segment lengths sum to " + std::to_string(total) +
                            ", series length is " + std::to_string(T));
    }

    Json names = Json::array();
    Json boundaries = Json::array();
    for (const auto& [lo, hi] : bounds) {
        const auto name =
            ctx.store.put_derived(window_view(src, lo, hi), src.name(), "segment");
        names.push_back(name);
        boundaries.push_back(Json::array({lo, hi}));
    }
    Observation obs;
    obs.kind = ValueKind::Series;
    obs.value = Json{{"segments", names}, {"boundaries", boundaries}};
    obs.diagnostics = Json{{"series_length", T}};
    return obs;
}

Observation resample_series(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    const double target = args.at("interval").get<double>();
    const std::string method = choice(args, "method", "mean");
    if (!src.interval())
        throw ToolError("series \"" + src.name() + "\" has no constant sampling interval");
    const double source = *src.interval();
    if (target <= 0.0) throw ToolError("interval must be positive");
    const double ratio = target / source;
    if (ratio < 1.0 - 1e-9)
        throw ToolError("upsampling is not supported (target interval " +
                        std::to_string(target) + " < source interval " + std::to_string(source) +
                        ")");
    if (std::fabs(ratio - std::round(ratio)) > 1e-9)
        throw ToolError("interval must be a positive multiple of the source interval");
    const auto factor = static_cast<std::size_t>(std::llround(ratio));
    if (factor == 1) {
        return series_observation(ctx, src, src.name(), "resample");
    }

    const std::size_t T = src.length();
    const std::size_t buckets = (T + factor - 1) / factor;
    std::vector<double> index(buckets);
    for (std::size_t b = 0; b < buckets; ++b) index[b] = src.index()[b * factor];
    std::vector<std::vector<double>> values(src.dim(), std::vector<double>(buckets));
    for (std::size_t c = 0; c < src.dim(); ++c) {
        auto row = src.channel_values(c);
        for (std::size_t b = 0; b < buckets; ++b) {
            const std::size_t lo = b * factor;
            const std::size_t hi = std::min(T, lo + factor);
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const double v = row[i];
                if (std::isnan(v))
                    throw ToolError("series \"" + src.name() +
                                    "\" contains missing values; tools do not impute");
                if (method == "sum" || method == "mean") acc += v;
                if (method == "last") acc = v;
            }
            if (method == "mean") acc /= static_cast<double>(hi - lo);
            values[c][b] = acc;
        }
    }
    TimeSeries out(src.name(), std::move(index), src.channels(), std::move(values),
                   buckets > 1 ? std::optional<double>(target) : std::nullopt);
    return series_observation(ctx, std::move(out), src.name(), "resample");
}

Observation select_channel(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    const auto& sel = args.at("channel");
    std::size_t ch = 0;
    if (sel.is_number_integer()) {
        const auto idx = sel.get<std::int64_t>();
        if (idx < 0 || static_cast<std::size_t>(idx) >= src.dim()) {
            std::string names;
            for (std::size_t i = 0; i < src.dim(); ++i) {
                if (i) names += ", ";
                names += "\"" + src.channels()[i] + "\"";
            }
            throw ToolError("channel index " + std::to_string(idx) + " out of range for series \"" +
                            src.name() + "\" (channels: " + names + ")");
        }
        ch = static_cast<std::size_t>(idx);
    } else {
        ch = src.channel_index(sel.get<std::string>());
    }
    auto row = src.channel_values(ch);
    TimeSeries out(src.name(), src.index(), {src.channels()[ch]},
                   {std::vector<double>(row.begin(), row.end())}, src.interval());
    return series_observation(ctx, std::move(out), src.name(), "channel");
}

Observation normalize_series(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    const std::string method = choice(args, "method", "zscore");
    const auto [lo, hi] = window(src, args, "ref_start", "ref_end");

    std::vector<std::vector<double>> values;
    values.reserve(src.dim());
    for (std::size_t c = 0; c < src.dim(); ++c) {
        auto row = src.channel_values(c);
        for (double v : row) {
            if (std::isnan(v))
                throw ToolError("series \"" + src.name() +
                                "\" contains missing values; tools do not impute");
        }
        std::span<const double> ref(row.begin() + lo, row.begin() + hi);
        std::vector<double> out(row.begin(), row.end());
        if (method == "zscore") {
            if (ref.size() < 2) throw ToolError("zscore reference window needs >= 2 points");
            const double m = detail::mean(ref);
            const double sd = detail::sample_std(ref);
            if (sd <= 0.0)
                throw ToolError("cannot z-score series \"" + src.name() +
                                "\": constant over the reference window");
            for (auto& v : out) v = (v - m) / sd;
        } else {  // minmax
            const double mn = detail::min_value(ref);
            const double mx = detail::max_value(ref);
            if (mx <= mn)
                throw ToolError("cannot min-max normalize series \"" + src.name() +
                                "\": constant over the reference window");
            for (auto& v : out) v = (v - mn) / (mx - mn);
        }
        values.push_back(std::move(out));
    }
    TimeSeries out(src.name(), src.index(), src.channels(), std::move(values), src.interval());
    return series_observation(ctx, std::move(out), src.name(), "normalize");
}

}  // namespace

void register_processing_tools(Toolkit& kit) {
    kit.add({"slice_series",
             ToolFamily::Processing,
             {{"name", ParamType::Series, true, {}},
              {"start", ParamType::Number, true, {}},
              {"end", ParamType::Number, true, {}}},
             ValueKind::Series,
             "Extract a subsequence between two positions/timestamps (start inclusive, end "
             "exclusive)."},
            slice_series);
    kit.add({"segment_series",
             ToolFamily::Processing,
             {{"name", ParamType::Series, true, {}},
              {"k", ParamType::Integer, false, {}},
              {"lengths", ParamType::IntList, false, {}}},
             ValueKind::Series,
             "Partition a series into k equal segments (last absorbs the remainder) or into "
             "given lengths; returns segment names and boundaries."},
            segment_series);
    kit.add({"resample_series",
             ToolFamily::Processing,
             {{"name", ParamType::Series, true, {}},
              {"interval", ParamType::Number, true, {}},
              {"method", ParamType::Choice, false, {"mean", "sum", "last"}}},
             ValueKind::Series,
             "Downsample to a coarser interval with mean/sum/last aggregation."},
            resample_series);
    kit.add({"select_channel",
             ToolFamily::Processing,
             {{"name", ParamType::Series, true, {}}, {"channel", ParamType::Channel, true, {}}},
             ValueKind::Series, "Extract one channel of a multivariate series by name or index."},
            select_channel);
    kit.add({"normalize_series",
             ToolFamily::Processing,
             {{"name", ParamType::Series, true, {}},
              {"method", ParamType::Choice, false, {"zscore", "minmax"}},
              {"ref_start", ParamType::Number, false, {}},
              {"ref_end", ParamType::Number, false, {}}},
             ValueKind::Series,
             "Normalize values (zscore or minmax), optionally against a reference window."},
            normalize_series);
}

}  // namespace tsr
