#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsreason/json.hpp"

namespace tsr {

/// Error raised by tools and series operations. The message is surfaced to
/// the agent verbatim as tool feedback, so it must be self-contained.
struct ToolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownSeriesError : ToolError {
    using ToolError::ToolError;
};

struct SeriesMeta {
    std::size_t length = 0;
    std::size_t dim = 0;
    std::vector<std::string> channels;
    std::optional<double> interval;
    std::vector<std::size_t> missing_per_channel;

    Json to_json() const;
};

/// A named, possibly multivariate numeric sequence over a strictly
/// increasing index. Missing values are stored as NaN and are always
/// surfaced explicitly; no analytic tool consumes them silently.
class TimeSeries {
public:
    TimeSeries(std::string name,
               std::vector<double> index,
               std::vector<std::string> channels,
               std::vector<std::vector<double>> values,
               std::optional<double> interval = std::nullopt);

    /// Single-channel series over positions 0..n-1.
    static TimeSeries univariate(std::string name, std::vector<double> values,
                                 std::string channel = "value");

    const std::string& name() const { return name_; }
    std::size_t length() const { return index_.size(); }
    std::size_t dim() const { return channels_.size(); }
    const std::vector<double>& index() const { return index_; }
    const std::vector<std::string>& channels() const { return channels_; }
    std::optional<double> interval() const { return interval_; }

    std::span<const double> channel_values(std::size_t ch) const;
    /// Values of the only channel; throws ToolError("x must be 1-D") style
    /// messages are left to callers — this throws a plain channel error.
    std::span<const double> values() const;

    std::size_t channel_index(std::string_view channel_name) const;
    bool is_univariate() const { return channels_.size() == 1; }

    std::size_t missing_count(std::size_t ch) const;
    bool has_missing() const;

    /// Resolve an index-or-timestamp argument to a position in [0, T).
    /// An exact match against the stored index wins; otherwise an integral
    /// value in range is taken as a position. Throws ToolError with the
    /// valid range otherwise.
    std::size_t resolve(double at) const;

    SeriesMeta meta() const;

    TimeSeries renamed(std::string new_name) const;

    Json to_json() const;
    static TimeSeries from_json(const Json& doc);

    bool operator==(const TimeSeries& other) const;

private:
    std::string name_;
    std::vector<double> index_;
    std::vector<std::string> channels_;
    std::vector<std::vector<double>> values_;  // one row per channel
    std::optional<double> interval_;
};

/// Named registry of series. Stored entries are immutable; every derived
/// result becomes a fresh entry named `<base>#<op>#<k>`.
class SeriesStore {
public:
    SeriesStore() = default;
    SeriesStore(const SeriesStore& other);
    SeriesStore& operator=(const SeriesStore& other);

    /// Register a series under its own name. Throws on duplicates and on
    /// names containing '#' (reserved for derived entries).
    void put(TimeSeries series);

    const TimeSeries& get(std::string_view name) const;
    bool contains(std::string_view name) const;

    /// Store a derived series as `<base>#<op>#<k>` with the smallest free k
    /// and return the assigned name.
    std::string put_derived(TimeSeries series, std::string_view base, std::string_view op);

    std::vector<std::string> names() const;
    std::size_t size() const;

private:
    std::map<std::string, TimeSeries, std::less<>> entries_;
    mutable std::mutex write_mutex_;
};

/// Root series name of a (possibly derived) entry: everything before the
/// first '#'.
std::string root_series_name(std::string_view name);

}  // namespace tsr
