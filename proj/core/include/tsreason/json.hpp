#pragma once

#include <json.hpp>

namespace tsr {

// Order-preserving JSON everywhere: trace files, fixtures, and series
// serializations must be byte-stable across runs.
using Json = nlohmann::ordered_json;

}  // namespace tsr
