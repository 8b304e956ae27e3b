#include "tsreason/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsr {

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + names[i] + "\"";
    }
    return out;
}

}  // namespace

Json SeriesMeta::to_json() const {
    Json doc;
    doc["length"] = length;
    doc["dim"] = dim;
    doc["channels"] = channels;
    if (interval) doc["interval"] = *interval;
    Json missing = Json::object();
    for (std::size_t i = 0; i < channels.size(); ++i) missing[channels[i]] = missing_per_channel[i];
    doc["missing"] = missing;
    return doc;
}

TimeSeries::TimeSeries(std::string name,
                       std::vector<double> index,
                       std::vector<std::string> channels,
                       std::vector<std::vector<double>> values,
                       std::optional<double> interval)
    : name_(std::move(name)),
      index_(std::move(index)),
      channels_(std::move(channels)),
      values_(std::move(values)),
      interval_(interval) {
    if (name_.empty()) throw std::invalid_argument("series name must be non-empty");
    if (index_.empty()) throw std::invalid_argument("series must have at least one point");
    if (channels_.empty()) throw std::invalid_argument("series must have at least one channel");
    if (values_.size() != channels_.size())
        throw std::invalid_argument("one value row per channel required");
    for (const auto& row : values_) {
        if (row.size() != index_.size())
            throw std::invalid_argument("value row length must match index length");
    }
    for (std::size_t i = 0; i + 1 < index_.size(); ++i) {
        if (!(index_[i] < index_[i + 1]))
            throw std::invalid_argument("index must be strictly increasing");
    }
    {
        auto sorted = channels_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("channel names must be unique");
    }
    if (interval_ && index_.size() > 1) {
        for (std::size_t i = 0; i + 1 < index_.size(); ++i) {
            const double step = index_[i + 1] - index_[i];
            if (std::fabs(step - *interval_) > 1e-9 * std::max(1.0, std::fabs(*interval_)))
                throw std::invalid_argument("interval does not match index spacing");
        }
    }
}

TimeSeries TimeSeries::univariate(std::string name, std::vector<double> values,
                                  std::string channel) {
    std::vector<double> index(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) index[i] = static_cast<double>(i);
    return TimeSeries(std::move(name), std::move(index), {std::move(channel)},
                      {std::move(values)}, 1.0);
}

std::span<const double> TimeSeries::channel_values(std::size_t ch) const {
    if (ch >= values_.size()) throw ToolError("channel index out of range");
    return values_[ch];
}

std::span<const double> TimeSeries::values() const {
    if (!is_univariate()) {
        throw ToolError("series \"" + name_ + "\" has " + std::to_string(dim()) +
                        " channels; select a channel first (channels: " + join_names(channels_) +
                        ")");
    }
    return values_[0];
}

std::size_t TimeSeries::channel_index(std::string_view channel_name) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        if (channels_[i] == channel_name) return i;
    }
    throw ToolError("unknown channel \"" + std::string(channel_name) + "\" in series \"" + name_ +
                    "\" (channels: " + join_names(channels_) + ")");
}

std::size_t TimeSeries::missing_count(std::size_t ch) const {
    const auto row = channel_values(ch);
    return static_cast<std::size_t>(
        std::count_if(row.begin(), row.end(), [](double v) { return std::isnan(v); }));
}

bool TimeSeries::has_missing() const {
    for (std::size_t c = 0; c < dim(); ++c) {
        if (missing_count(c) > 0) return true;
    }
    return false;
}

std::size_t TimeSeries::resolve(double at) const {
    const auto it = std::lower_bound(index_.begin(), index_.end(), at);
    if (it != index_.end() && *it == at)
        return static_cast<std::size_t>(std::distance(index_.begin(), it));
    if (at == std::floor(at) && at >= 0.0 && at < static_cast<double>(length()))
        return static_cast<std::size_t>(at);
    std::ostringstream msg;
    msg << "position " << at << " is out of range for series \"" << name_
        << "\" (valid positions 0.." << (length() - 1) << ", index " << index_.front() << ".."
        << index_.back() << ")";
    throw ToolError(msg.str());
}

SeriesMeta TimeSeries::meta() const {
    SeriesMeta m;
    m.length = length();
    m.dim = dim();
    m.channels = channels_;
    m.interval = interval_;
    m.missing_per_channel.resize(dim());
    for (std::size_t c = 0; c < dim(); ++c) m.missing_per_channel[c] = missing_count(c);
    return m;
}

TimeSeries TimeSeries::renamed(std::string new_name) const {
    return TimeSeries(std::move(new_name), index_, channels_, values_, interval_);
}

Json TimeSeries::to_json() const {
    Json doc;
    doc["name"] = name_;
    doc["index"] = index_;
    Json channels = Json::object();
    for (std::size_t c = 0; c < dim(); ++c) {
        Json row = Json::array();
        for (double v : values_[c]) {
            if (std::isnan(v))
                row.push_back(nullptr);
            else
                row.push_back(v);
        }
        channels[channels_[c]] = std::move(row);
    }
    doc["channels"] = std::move(channels);
    if (interval_) doc["interval"] = *interval_;
    return doc;
}

TimeSeries TimeSeries::from_json(const Json& doc) {
    if (!doc.is_object() || !doc.contains("name") || !doc.contains("index") ||
        !doc.contains("channels"))
        throw std::invalid_argument("series JSON requires name, index, channels");
    std::vector<double> index = doc.at("index").get<std::vector<double>>();
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    for (const auto& [ch, arr] : doc.at("channels").items()) {
        names.push_back(ch);
        std::vector<double> row;
        row.reserve(arr.size());
        for (const auto& cell : arr) {
            if (cell.is_null())
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                row.push_back(cell.get<double>());
        }
        rows.push_back(std::move(row));
    }
    std::optional<double> interval;
    if (doc.contains("interval")) interval = doc.at("interval").get<double>();
    return TimeSeries(doc.at("name").get<std::string>(), std::move(index), std::move(names),
                      std::move(rows), interval);
}

bool TimeSeries::operator==(const TimeSeries& other) const {
    if (name_ != other.name_ || channels_ != other.channels_ || index_ != other.index_ ||
        interval_ != other.interval_)
        return false;
    for (std::size_t c = 0; c < values_.size(); ++c) {
        const auto& a = values_[c];
        const auto& b = other.values_[c];
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const bool both_nan = std::isnan(a[i]) && std::isnan(b[i]);
            if (!both_nan && a[i] != b[i]) return false;
        }
    }
    return true;
}

SeriesStore::SeriesStore(const SeriesStore& other) {
    std::lock_guard lock(other.write_mutex_);
    entries_ = other.entries_;
}

SeriesStore& SeriesStore::operator=(const SeriesStore& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(write_mutex_, other.write_mutex_);
    entries_ = other.entries_;
    return *this;
}

void SeriesStore::put(TimeSeries series) {
    std::lock_guard lock(write_mutex_);
    if (series.name().find('#') != std::string::npos)
        throw std::invalid_argument("series names must not contain '#' (reserved)");
    if (entries_.contains(series.name()))
        throw std::invalid_argument("duplicate series name \"" + series.name() + "\"");
    auto name = series.name();
    entries_.emplace(std::move(name), std::move(series));
}

const TimeSeries& SeriesStore::get(std::string_view name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end()) {
        std::vector<std::string> known;
        known.reserve(entries_.size());
        for (const auto& [k, _] : entries_) known.push_back(k);
        throw UnknownSeriesError("unknown series \"" + std::string(name) +
                                 "\" (known series: [" + join_names(known) + "])");
    }
    return it->second;
}

bool SeriesStore::contains(std::string_view name) const {
    return entries_.find(name) != entries_.end();
}

std::string SeriesStore::put_derived(TimeSeries series, std::string_view base,
                                     std::string_view op) {
    std::lock_guard lock(write_mutex_);
    std::size_t k = 1;
    std::string candidate;
    do {
        candidate = std::string(base) + "#" + std::string(op) + "#" + std::to_string(k);
        ++k;
    } while (entries_.contains(candidate));
    entries_.emplace(candidate, series.renamed(candidate));
    return candidate;
}

std::vector<std::string> SeriesStore::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, _] : entries_) out.push_back(k);
    return out;
}

std::size_t SeriesStore::size() const { return entries_.size(); }

std::string root_series_name(std::string_view name) {
    const auto pos = name.find('#');
    return std::string(pos == std::string_view::npos ? name : name.substr(0, pos));
}

}  // namespace tsr
