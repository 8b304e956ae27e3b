#include <algorithm>
#include <cmath>
#include <queue>

#include "tool_support.hpp"
#include "tsreason/detail/distributions.hpp"
#include "tsreason/detail/stats.hpp"
#include "tsreason/toolkit.hpp"

namespace tsr {

namespace {

using namespace toolsupport;

constexpr double kTrendAlpha = 0.05;
constexpr double kAnomalyThreshold = 3.0;
constexpr std::size_t kAnomalyWindow = 25;
constexpr double kSeasonWeak = 0.3;
constexpr double kSeasonStrong = 0.6;

std::span<const double> trailing(std::span<const double> xs, std::optional<std::int64_t> window) {
    if (!window) return xs;
    if (*window < 2) throw ToolError("window must be >= 2");
    const auto w = static_cast<std::size_t>(*window);
    if (w > xs.size())
        throw ToolError("window " + std::to_string(w) + " is longer than the series (" +
                        std::to_string(xs.size()) + " points)");
    return xs.subspan(xs.size() - w);
}

Observation trend_classifier(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = trailing(univariate_values(src), opt_int(args, "window"));
    if (xs.size() < 3) throw ToolError("trend test needs at least 3 points");
    const auto fit = detail::fit_line(xs);
    std::string label = "flat";
    if (fit.slope_p < kTrendAlpha) label = fit.slope > 0.0 ? "up" : "down";
    return category_observation(
        label, Json{{"slope", fit.slope}, {"p_value", fit.slope_p}, {"t_stat", fit.slope_t}});
}

/// Rolling-median baseline over a centered window; the window shrinks at the
/// edges. Residual scale is the MAD of the residuals.
struct RobustResiduals {
    std::vector<double> residual;
    std::vector<double> zscore;
    double sigma = 0.0;
};

RobustResiduals robust_residuals(std::span<const double> xs, std::size_t window) {
    const std::size_t n = xs.size();
    if (window < 3) throw ToolError("window must be >= 3");
    if (window > n)
        throw ToolError("window " + std::to_string(window) + " is longer than the series (" +
                        std::to_string(n) + " points)");
    const std::size_t half = window / 2;
    RobustResiduals out;
    out.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n, i + half + 1);
        out.residual[i] = xs[i] - detail::median(xs.subspan(lo, hi - lo));
    }
    out.sigma = detail::mad_sigma(out.residual);
    if (out.sigma <= 0.0) {
        // discrete/flat data: fall back to the residual sd, if any
        double ss = 0.0;
        for (double r : out.residual) ss += r * r;
        out.sigma = std::sqrt(ss / static_cast<double>(n));
    }
    out.zscore.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.zscore[i] = out.sigma > 0.0 ? out.residual[i] / out.sigma : 0.0;
    return out;
}

Observation anomaly_classifier(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name", "x must be 1-D");
    auto xs = univariate_values(src, "x must be 1-D");
    const double threshold = opt_number(args, "threshold").value_or(kAnomalyThreshold);
    const auto window =
        static_cast<std::size_t>(opt_int(args, "window").value_or(kAnomalyWindow));
    const auto rr = robust_residuals(xs, window);
    const std::size_t n = xs.size();

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(rr.zscore[i]) > threshold) flagged.push_back(i);
    }

    Json spans = Json::array();
    std::vector<std::size_t> indices;
    std::size_t i = 0;
    while (i < flagged.size()) {
        std::size_t j = i;
        while (j + 1 < flagged.size() && flagged[j + 1] == flagged[j] + 1) ++j;
        const std::size_t lo = flagged[i];
        const std::size_t hi = flagged[j];

        // span type: persistent shift of the trailing median marks a level
        // shift, otherwise sign of the residual marks spike vs dip
        const std::size_t ctx_len = std::min<std::size_t>(20, n);
        const std::size_t pre_lo = lo >= ctx_len ? lo - ctx_len : 0;
        const double pre = lo > pre_lo ? detail::median(xs.subspan(pre_lo, lo - pre_lo)) : xs[lo];
        const std::size_t post_hi = std::min(n, hi + 1 + ctx_len);
        const double post =
            post_hi > hi + 1 ? detail::median(xs.subspan(hi + 1, post_hi - hi - 1)) : xs[hi];
        double span_resid = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) span_resid += rr.residual[k];
        std::string type;
        if (std::fabs(post - pre) > 0.5 * threshold * rr.sigma)
            type = "level shift";
        else
            type = span_resid >= 0.0 ? "spike" : "dip";
        spans.push_back(Json{{"start", lo}, {"end", hi}, {"type", type}});
        for (std::size_t k = lo; k <= hi; ++k) indices.push_back(k);
        i = j + 1;
    }

    auto obs = index_set_observation(
        indices, Json{{"spans", spans},
                      {"threshold", threshold},
                      {"sigma", rr.sigma},
                      {"series_length", n}});
    return obs;
}

Observation spike_detector(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name", "x must be 1-D");
    auto xs = univariate_values(src, "x must be 1-D");
    const double threshold = opt_number(args, "threshold").value_or(kAnomalyThreshold);
    const auto min_sep = static_cast<std::size_t>(opt_int(args, "min_sep").value_or(1));
    const auto window =
        static_cast<std::size_t>(opt_int(args, "window").value_or(kAnomalyWindow));
    const auto rr = robust_residuals(xs, window);

    struct Hit {
        std::size_t index;
        double z;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::fabs(rr.zscore[i]) > threshold) hits.push_back({i, rr.zscore[i]});
    }
    // merge near-duplicates, keeping the strongest
    std::vector<Hit> merged;
    for (const auto& h : hits) {
        if (!merged.empty() && h.index - merged.back().index < std::max<std::size_t>(min_sep, 1)) {
            if (std::fabs(h.z) > std::fabs(merged.back().z)) merged.back() = h;
        } else {
            merged.push_back(h);
        }
    }
    std::vector<std::size_t> indices;
    Json types = Json::array();
    for (const auto& h : merged) {
        indices.push_back(h.index);
        types.push_back(h.z >= 0.0 ? "spike" : "dip");
    }
    return index_set_observation(indices, Json{{"types", types},
                                               {"threshold", threshold},
                                               {"min_sep", min_sep},
                                               {"series_length", xs.size()}});
}

Observation seasonality_detector(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    const auto max_period = args.at("max_period").get<std::int64_t>();
    if (max_period < 2) throw ToolError("max_period must be >= 2");
    if (xs.size() < 2 * static_cast<std::size_t>(max_period))
        throw ToolError("series too short: seasonality detection needs T >= 2*max_period (T=" +
                        std::to_string(xs.size()) + ", max_period=" + std::to_string(max_period) +
                        ")");

    // detrend before the ACF scan so trending series keep their cycles visible
    const auto fit = detail::fit_line(xs);
    std::vector<double> detrended(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t)
        detrended[t] = xs[t] - (fit.intercept + fit.slope * static_cast<double>(t));

    double best_acf = -2.0;
    std::size_t best_lag = 0;
    for (std::int64_t lag = 2; lag <= max_period; ++lag) {
        const double r = detail::autocorrelation(detrended, static_cast<std::size_t>(lag));
        if (r > best_acf) {
            best_acf = r;
            best_lag = static_cast<std::size_t>(lag);
        }
    }
    std::string label = "none";
    if (best_acf >= kSeasonStrong)
        label = "strong";
    else if (best_acf >= kSeasonWeak)
        label = "weak";
    return category_observation(label, Json{{"period", best_lag}, {"strength", best_acf}});
}

// Gaussian segment cost (mean and variance free): n/2 * log(sigma2_mle).
double gaussian_cost(std::span<const double> xs) {
    const std::size_t n = xs.size();
    const double m = detail::mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double var = ss / static_cast<double>(n) + 1e-10;
    return 0.5 * static_cast<double>(n) * std::log(var);
}

struct Split {
    double gain = -1.0;
    std::size_t at = 0;  // first index of the right segment
};

Split best_split(std::span<const double> xs, std::size_t offset, std::size_t min_len) {
    Split best;
    if (xs.size() < 2 * min_len) return best;
    const double whole = gaussian_cost(xs);
    for (std::size_t cut = min_len; cut + min_len <= xs.size(); ++cut) {
        const double gain =
            whole - gaussian_cost(xs.subspan(0, cut)) - gaussian_cost(xs.subspan(cut));
        if (gain > best.gain) {
            best.gain = gain;
            best.at = offset + cut;
        }
    }
    return best;
}

Observation change_point_detector(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    if (xs.size() < 10) throw ToolError("change-point detection needs at least 10 points");
    const bool has_penalty = args.contains("penalty");
    const bool has_ncp = args.contains("n_cp");
    if (has_penalty && has_ncp) throw ToolError("supply either penalty or n_cp, not both");
    const double penalty =
        has_penalty ? args.at("penalty").get<double>()
                    : 3.0 * std::log(static_cast<double>(xs.size()));
    const std::int64_t n_cp = has_ncp ? args.at("n_cp").get<std::int64_t>() : -1;
    if (has_ncp && n_cp < 1) throw ToolError("n_cp must be >= 1");
    constexpr std::size_t kMinSegment = 5;

    // binary segmentation: greedily take the highest-gain split
    struct Candidate {
        Split split;
        std::size_t lo, hi;
        bool operator<(const Candidate& other) const { return split.gain < other.split.gain; }
    };
    std::priority_queue<Candidate> queue;
    auto push_segment = [&](std::size_t lo, std::size_t hi) {
        const auto split = best_split(xs.subspan(lo, hi - lo), lo, kMinSegment);
        if (split.gain > 0.0) queue.push({split, lo, hi});
    };
    push_segment(0, xs.size());

    std::vector<std::size_t> cps;
    while (!queue.empty()) {
        const auto cand = queue.top();
        queue.pop();
        if (!has_ncp && cand.split.gain < penalty) break;
        cps.push_back(cand.split.at);
        if (has_ncp && static_cast<std::int64_t>(cps.size()) >= n_cp) break;
        push_segment(cand.lo, cand.split.at);
        push_segment(cand.split.at, cand.hi);
    }
    std::sort(cps.begin(), cps.end());
    return index_set_observation(
        cps, Json{{"penalty", has_ncp ? Json(nullptr) : Json(penalty)},
                  {"series_length", xs.size()}});
}

Observation noise_profile(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = trailing(univariate_values(src), opt_int(args, "window"));
    if (xs.size() < 30) throw ToolError("noise profiling needs at least 30 points");
    const double r1 = detail::autocorrelation(xs, 1);
    // one-sided test of lag-1 autocorrelation > 0 at the 5% level
    const double crit = 1.645 / std::sqrt(static_cast<double>(xs.size()));
    const std::string label = r1 > crit ? "red" : "white";
    return category_observation(label, Json{{"r1", r1}, {"critical", crit}});
}

double adf_statistic(std::span<const double> xs) {
    const std::size_t n = xs.size();
    // deterministic lag rule (Schwert), capped to keep the regression sane
    std::size_t p = static_cast<std::size_t>(
        std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    p = std::min(p, n / 10);

    const auto dx = detail::diff(xs);
    const std::size_t rows = dx.size() - p;
    std::vector<std::vector<double>> design(rows);
    std::vector<double> y(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        const std::size_t i = t + p;  // index into dx; level lag is xs[i]
        y[t] = dx[i];
        auto& row = design[t];
        row.reserve(2 + p);
        row.push_back(1.0);
        row.push_back(xs[i]);
        for (std::size_t l = 1; l <= p; ++l) row.push_back(dx[i - l]);
    }
    const auto fit = detail::ols(design, y);
    if (fit.stderr_coef[1] <= 0.0) throw ToolError("degenerate ADF regression");
    return fit.coef[1] / fit.stderr_coef[1];
}

double kpss_statistic(std::span<const double> xs) {
    const std::size_t n = xs.size();
    const double m = detail::mean(xs);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = xs[i] - m;

    double cum = 0.0;
    double s_sq_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += e[i];
        s_sq_sum += cum * cum;
    }
    // Bartlett long-run variance
    const auto L = static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    double lrv = 0.0;
    for (double v : e) lrv += v * v;
    lrv /= static_cast<double>(n);
    for (std::size_t l = 1; l <= L; ++l) {
        double gamma = 0.0;
        for (std::size_t t = l; t < n; ++t) gamma += e[t] * e[t - l];
        gamma /= static_cast<double>(n);
        lrv += 2.0 * (1.0 - static_cast<double>(l) / static_cast<double>(L + 1)) * gamma;
    }
    if (lrv <= 0.0) throw ToolError("degenerate KPSS long-run variance");
    return s_sq_sum / (static_cast<double>(n) * static_cast<double>(n) * lrv);
}

Observation stationarity_test(const Json& args, ToolContext& ctx) {
    const auto& src = fetch(ctx, args, "name");
    auto xs = univariate_values(src);
    if (xs.size() < 20) throw ToolError("stationarity tests need at least 20 points");
    const std::string test = choice(args, "test", "adf");
    if (test == "adf") {
        const double stat = adf_statistic(xs);
        const double crit = detail::adf_critical_5pct_constant(xs.size());
        const std::string label = stat < crit ? "stationary" : "nonstationary";
        return category_observation(label,
                                    Json{{"test", "adf"}, {"statistic", stat}, {"critical", crit}});
    }
    const double stat = kpss_statistic(xs);
    const double crit = detail::kpss_critical_5pct_level();
    // KPSS null is stationarity; rejection means nonstationary
    const std::string label = stat > crit ? "nonstationary" : "stationary";
    return category_observation(label,
                                Json{{"test", "kpss"}, {"statistic", stat}, {"critical", crit}});
}

}  // namespace

void register_detection_tools(Toolkit& kit) {
    kit.add({"trend_classifier",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}}, {"window", ParamType::Integer, false, {}}},
             ValueKind::Category,
             "Classify the trend as up/down/flat via a least-squares slope significance test; "
             "optional trailing window."},
            trend_classifier);
    kit.add({"anomaly_classifier",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}},
              {"threshold", ParamType::Number, false, {}},
              {"window", ParamType::Integer, false, {}}},
             ValueKind::IndexSet,
             "Flag anomalous points/spans of a 1-D series (robust z-score against a rolling "
             "median) and label each span spike/dip/level shift."},
            anomaly_classifier);
    kit.add({"seasonality_detector",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}}, {"max_period", ParamType::Integer, true, {}}},
             ValueKind::Category,
             "Detect periodicity: dominant period up to max_period plus a none/weak/strong "
             "strength label."},
            seasonality_detector);
    kit.add({"change_point_detector",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}},
              {"penalty", ParamType::Number, false, {}},
              {"n_cp", ParamType::Integer, false, {}}},
             ValueKind::IndexSet,
             "Locate structural breaks in mean/variance by binary segmentation; stop by penalty "
             "or a requested count."},
            change_point_detector);
    kit.add({"noise_profile",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}}, {"window", ParamType::Integer, false, {}}},
             ValueKind::Category,
             "Label the noise colour white or red from the lag-1 autocorrelation."},
            noise_profile);
    kit.add({"stationarity_test",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}},
              {"test", ParamType::Choice, false, {"adf", "kpss"}}},
             ValueKind::Category,
             "ADF or KPSS test; returns stationary/nonstationary plus the test statistic."},
            stationarity_test);
    kit.add({"spike_detector",
             ToolFamily::Detection,
             {{"name", ParamType::Series, true, {}},
              {"threshold", ParamType::Number, false, {}},
              {"min_sep", ParamType::Integer, false, {}},
              {"window", ParamType::Integer, false, {}}},
             ValueKind::IndexSet,
             "Locate isolated spikes/dips of a 1-D series; detections closer than min_sep are "
             "merged keeping the strongest."},
            spike_detector);
}

}  // namespace tsr
