#include "tsreason/series_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace tsr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    for (auto& c : cells) {
        const auto b = c.find_first_not_of(" \t");
        const auto e = c.find_last_not_of(" \t");
        c = b == std::string::npos ? "" : c.substr(b, e - b + 1);
    }
    return cells;
}

bool parse_number(const std::string& text, double& out) {
    if (text.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(text, &used);
    } catch (...) {
        return false;
    }
    return used == text.size();
}

std::optional<double> detect_interval(const std::vector<double>& index) {
    if (index.size() < 2) return std::nullopt;
    const double step = index[1] - index[0];
    for (std::size_t i = 0; i + 1 < index.size(); ++i) {
        if (std::fabs((index[i + 1] - index[i]) - step) > 1e-9 * std::max(1.0, std::fabs(step)))
            return std::nullopt;
    }
    return step;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TimeSeries parse_csv_series(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    const auto header = split_line(line);
    if (header.size() < 2)
        throw std::runtime_error("CSV needs a time column plus at least one channel");
    const std::vector<std::string> channels(header.begin() + 1, header.end());

    struct Row {
        double t;
        std::vector<double> vals;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("CSV row " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        Row row;
        if (!parse_number(cells[0], row.t))
            throw std::runtime_error("CSV row " + std::to_string(line_no) +
                                     ": time cell \"" + cells[0] + "\" is not numeric");
        row.vals.resize(channels.size());
        for (std::size_t c = 0; c < channels.size(); ++c) {
            double v = 0.0;
            row.vals[c] = parse_number(cells[c + 1], v)
                              ? v
                              : std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("CSV has no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i].t == rows[i + 1].t)
            throw std::runtime_error("duplicate timestamp " + std::to_string(rows[i].t));
    }

    std::vector<double> index(rows.size());
    std::vector<std::vector<double>> values(channels.size(), std::vector<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        index[i] = rows[i].t;
        for (std::size_t c = 0; c < channels.size(); ++c) values[c][i] = rows[i].vals[c];
    }
    const auto interval = detect_interval(index);
    return TimeSeries(name, std::move(index), channels, std::move(values), interval);
}

const TimeSeries& load_series(SeriesStore& store, const std::filesystem::path& path,
                              SeriesFormat format, const std::string& name) {
    const std::string text = read_file(path);
    TimeSeries series = [&] {
        switch (format) {
            case SeriesFormat::Csv:
                return parse_csv_series(text, name);
            case SeriesFormat::Json: {
                Json doc = Json::parse(text);
                doc["name"] = name;
                auto s = TimeSeries::from_json(doc);
                if (!s.interval()) {
                    // recover a constant sampling period if the file omitted it
                    auto detected = detect_interval(s.index());
                    if (detected)
                        return TimeSeries(s.name(), s.index(), s.channels(),
                                          [&] {
                                              std::vector<std::vector<double>> rows;
                                              for (std::size_t c = 0; c < s.dim(); ++c) {
                                                  auto row = s.channel_values(c);
                                                  rows.emplace_back(row.begin(), row.end());
                                              }
                                              return rows;
                                          }(),
                                          detected);
                }
                return s;
            }
        }
        throw std::logic_error("unreachable");
    }();
    store.put(std::move(series));
    return store.get(name);
}

const TimeSeries& load_series(SeriesStore& store, const std::filesystem::path& path,
                              const std::string& name) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return load_series(store, path, SeriesFormat::Csv, name);
    if (ext == ".json") return load_series(store, path, SeriesFormat::Json, name);
    throw std::runtime_error("cannot infer series format from extension \"" + ext +
                             "\" (expected .csv or .json)");
}

void save_series_json(const TimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << series.to_json().dump(2) << "\n";
}

}  // namespace tsr
