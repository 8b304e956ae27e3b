#include <algorithm>
#include <cmath>
#include <limits>

#include "tool_support.hpp"
#include "tsreason/detail/distributions.hpp"
#include "tsreason/detail/stats.hpp"
#include "tsreason/toolkit.hpp"

namespace tsr {

namespace {

using namespace toolsupport;

/// Lagged correlation with the convention that a positive lag means the
/// first series leads: pairs are (x[t-lag], y[t]).
double lagged_correlation(std::span<const double> xs, std::span<const double> ys,
                          std::int64_t lag, const std::string& method) {
    std::vector<double> a, b;
    const auto nx = static_cast<std::int64_t>(xs.size());
    const auto ny = static_cast<std::int64_t>(ys.size());
    for (std::int64_t t = 0; t < ny; ++t) {
        const std::int64_t s = t - lag;
        if (s < 0 || s >= nx) continue;
        a.push_back(xs[static_cast<std::size_t>(s)]);
        b.push_back(ys[static_cast<std::size_t>(t)]);
    }
    if (a.size() < 3)
        throw ToolError("fewer than 3 overlapping points after shifting by lag " +
                        std::to_string(lag));
    if (method == "spearman") {
        const auto ra = detail::ranks(a);
        const auto rb = detail::ranks(b);
        return detail::pearson(ra, rb);
    }
    return detail::pearson(a, b);
}

Observation corr_relation(const Json& args, ToolContext& ctx) {
    const auto& s1 = fetch(ctx, args, "name1");
    const auto& s2 = fetch(ctx, args, "name2");
    auto xs = univariate_values(s1);
    auto ys = univariate_values(s2);
    const auto lag = opt_int(args, "lag").value_or(0);
    const std::string method = choice(args, "method", "pearson");
    Observation obs = real_observation(lagged_correlation(xs, ys, lag, method));
    obs.diagnostics = Json{{"lag", lag}, {"method", method}};
    return obs;
}

Observation cross_correlation(const Json& args, ToolContext& ctx) {
    const auto& s1 = fetch(ctx, args, "name1");
    const auto& s2 = fetch(ctx, args, "name2");
    auto xs = univariate_values(s1);
    auto ys = univariate_values(s2);
    const auto max_lag = args.at("max_lag").get<std::int64_t>();
    if (max_lag < 0) throw ToolError("max_lag must be >= 0");
    if (static_cast<std::size_t>(max_lag) >= std::min(xs.size(), ys.size()))
        throw ToolError("max_lag must be smaller than the series length");

    Json lags = Json::array();
    Json ccf = Json::array();
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_lag = 0;
    for (std::int64_t lag = -max_lag; lag <= max_lag; ++lag) {
        const double r = lagged_correlation(xs, ys, lag, "pearson");
        lags.push_back(lag);
        ccf.push_back(r);
        const bool better =
            r > best + 1e-12 ||
            (std::fabs(r - best) <= 1e-12 &&
             (std::llabs(lag) < std::llabs(best_lag) ||
              (std::llabs(lag) == std::llabs(best_lag) && lag < best_lag)));
        if (better) {
            best = r;
            best_lag = lag;
        }
    }
    Observation obs;
    obs.kind = ValueKind::Relation;
    obs.value = Json{{"best_lag", best_lag}, {"best_corr", best}, {"lags", lags}, {"ccf", ccf}};
    return obs;
}

Observation dtw_distance(const Json& args, ToolContext& ctx) {
    const auto& s1 = fetch(ctx, args, "name1");
    const auto& s2 = fetch(ctx, args, "name2");
    auto xs = univariate_values(s1);
    auto ys = univariate_values(s2);
    const std::size_t n = xs.size();
    const std::size_t m = ys.size();

    // full-window DP over squared pointwise cost
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = kInf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double d = xs[i - 1] - ys[j - 1];
            cur[j] = d * d + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return real_observation(prev[m]);
}

Observation shape_similarity(const Json& args, ToolContext& ctx) {
    const auto& s1 = fetch(ctx, args, "name1");
    const auto& s2 = fetch(ctx, args, "name2");
    auto xs = univariate_values(s1);
    auto ys = univariate_values(s2);
    if (xs.size() != ys.size())
        throw ToolError("shape similarity needs equal-length series (" +
                        std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + ")");
    // Pearson correlation of z-normalized series == plain Pearson, which is
    // what makes the score invariant to affine rescaling.
    return real_observation(detail::pearson(xs, ys));
}

Observation granger_causality(const Json& args, ToolContext& ctx) {
    const auto& s1 = fetch(ctx, args, "name1");
    const auto& s2 = fetch(ctx, args, "name2");
    auto xs = univariate_values(s1);
    auto ys = univariate_values(s2);
    const auto maxlag = args.at("maxlag").get<std::int64_t>();
    if (maxlag < 1) throw ToolError("maxlag must be >= 1");
    const std::size_t p = static_cast<std::size_t>(maxlag);
    const std::size_t n = std::min(xs.size(), ys.size());
    if (n < 10 * p)
        throw ToolError("granger test needs T >= 10*maxlag (T=" + std::to_string(n) +
                        ", maxlag=" + std::to_string(p) + ")");
    // align on the trailing overlap
    auto x = xs.subspan(xs.size() - n);
    auto y = ys.subspan(ys.size() - n);

    const std::size_t rows = n - p;
    std::vector<double> target(rows);
    std::vector<std::vector<double>> restricted(rows), unrestricted(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        const std::size_t i = t + p;
        target[t] = y[i];
        auto& r = restricted[t];
        auto& u = unrestricted[t];
        r.reserve(1 + p);
        u.reserve(1 + 2 * p);
        r.push_back(1.0);
        u.push_back(1.0);
        for (std::size_t l = 1; l <= p; ++l) {
            r.push_back(y[i - l]);
            u.push_back(y[i - l]);
        }
        for (std::size_t l = 1; l <= p; ++l) u.push_back(x[i - l]);
    }

    double rss_r = 0.0, rss_u = 0.0;
    try {
        rss_r = detail::ols_rss(restricted, target);
        rss_u = detail::ols_rss(unrestricted, target);
    } catch (const std::exception&) {
        throw ToolError("granger regression is rank-deficient (constant input?)");
    }
    const double dof = static_cast<double>(rows) - static_cast<double>(2 * p) - 1.0;
    if (dof <= 0.0) throw ToolError("not enough observations for the granger F-test");
    double f = 0.0;
    if (rss_u > 0.0) f = ((rss_r - rss_u) / static_cast<double>(p)) / (rss_u / dof);
    if (f < 0.0) f = 0.0;
    const double p_value =
        rss_u > 0.0 ? detail::f_upper_tail_p(f, static_cast<double>(p), dof) : 0.0;
    const bool causes = p_value < 0.05;

    Observation obs;
    obs.kind = ValueKind::Relation;
    obs.value = Json{{"p_value", p_value}, {"decision", causes ? "yes" : "no"}};
    obs.diagnostics = Json{{"f_stat", f}, {"maxlag", maxlag}, {"n", rows}};
    return obs;
}

}  // namespace

void register_relation_tools(Toolkit& kit) {
    kit.add({"corr_relation",
             ToolFamily::Relation,
             {{"name1", ParamType::Series, true, {}},
              {"name2", ParamType::Series, true, {}},
              {"lag", ParamType::Integer, false, {}},
              {"method", ParamType::Choice, false, {"pearson", "spearman"}}},
             ValueKind::Real,
             "Pearson or Spearman correlation, optionally lagged (positive lag: first series "
             "leads)."},
            corr_relation);
    kit.add({"cross_correlation",
             ToolFamily::Relation,
             {{"name1", ParamType::Series, true, {}},
              {"name2", ParamType::Series, true, {}},
              {"max_lag", ParamType::Integer, true, {}}},
             ValueKind::Relation,
             "Cross-correlation function over lags -max_lag..max_lag and the best lag."},
            cross_correlation);
    kit.add({"dtw_distance",
             ToolFamily::Relation,
             {{"name1", ParamType::Series, true, {}}, {"name2", ParamType::Series, true, {}}},
             ValueKind::Real,
             "Dynamic time warping distance (squared pointwise cost); lower is more similar."},
            dtw_distance);
    kit.add({"shape_similarity",
             ToolFamily::Relation,
             {{"name1", ParamType::Series, true, {}},
              {"name2", ParamType::Series, true, {}},
              {"norm", ParamType::Choice, false, {"zscore"}}},
             ValueKind::Real,
             "Scale-invariant shape score in [-1, 1]: correlation of z-normalized series."},
            shape_similarity);
    kit.add({"granger_causality",
             ToolFamily::Relation,
             {{"name1", ParamType::Series, true, {}},
              {"name2", ParamType::Series, true, {}},
              {"maxlag", ParamType::Integer, true, {}}},
             ValueKind::Relation,
             "Nested-OLS F-test of whether the first series helps predict the second; returns "
             "p-value and a yes/no decision."},
            granger_causality);
}

}  // namespace tsr
