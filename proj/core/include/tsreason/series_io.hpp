#pragma once

#include <filesystem>
#include <string>

#include "tsreason/series.hpp"

namespace tsr {

enum class SeriesFormat { Csv, Json };

/// Load a series from disk and register it in the store under `name`.
///
/// CSV: header row required; first column is time, remaining columns are
/// channels. JSON: { "name": str, "index": [num], "channels": { ch: [num] } }
/// with null for missing values. Rows are sorted by time; non-numeric cells
/// become missing.
const TimeSeries& load_series(SeriesStore& store, const std::filesystem::path& path,
                              SeriesFormat format, const std::string& name);

/// Format inferred from the file extension (.csv / .json).
const TimeSeries& load_series(SeriesStore& store, const std::filesystem::path& path,
                              const std::string& name);

/// Parse CSV text into a series without registering it.
TimeSeries parse_csv_series(const std::string& text, const std::string& name);

void save_series_json(const TimeSeries& series, const std::filesystem::path& path);

}  // namespace tsr
