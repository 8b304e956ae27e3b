#pragma once

#include <cstdint>
#include <string>

#include "tsreason/json.hpp"

namespace tsr {

/// Output kind of a tool. Families constrain the kinds they may produce:
/// processing -> series, detection -> category/index_set, numeric ->
/// real/meta/series, relation -> real/relation. Errors are a kind of their
/// own so that no failure escapes as an unstructured exception.
enum class ValueKind { Series, Real, Category, IndexSet, Relation, Meta, Error };

std::string to_string(ValueKind kind);
ValueKind value_kind_from_string(const std::string& text);

struct ToolCall {
    std::string tool;
    Json args = Json::object();

    Json to_json() const;
    static ToolCall from_json(const Json& doc);
    bool operator==(const ToolCall& other) const = default;
};

/// Typed tool output with provenance; the unit of evidence. `seq` is
/// assigned when the observation is appended to an evidence log, so that
/// dispatch itself stays a pure function of (call, store).
struct Observation {
    ValueKind kind = ValueKind::Error;
    Json value;
    Json diagnostics = Json::object();
    ToolCall source;
    std::uint64_t seq = 0;

    bool is_error() const { return kind == ValueKind::Error; }
    std::string error_message() const;

    Json to_json() const;
    static Observation from_json(const Json& doc);
};

}  // namespace tsr
