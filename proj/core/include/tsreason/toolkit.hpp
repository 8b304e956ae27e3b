#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsreason/observation.hpp"
#include "tsreason/series.hpp"

namespace tsr {

class LlmBackend;
class Toolkit;

enum class ToolFamily { Processing, Detection, Numeric, Relation, Custom };

std::string to_string(ToolFamily family);

enum class ParamType { Series, Channel, Number, Integer, IntList, Text, Choice };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Text;
    bool required = false;
    std::vector<std::string> choices;  // Choice parameters only

    Json to_json() const;
};

struct ToolSpec {
    std::string name;
    ToolFamily family = ToolFamily::Numeric;
    std::vector<ParamSpec> parameters;
    ValueKind output = ValueKind::Real;
    std::string description;

    Json to_json() const;
    /// Usage line relayed in error feedback, e.g.
    /// {'parameters': [{'name': 'name', 'required': True}, ...]}
    std::string usage() const;
    const ParamSpec* find_param(std::string_view param) const;
};

/// Everything a tool implementation may touch. `toolkit` and `llm` exist
/// for custom_operator, which synthesizes and registers pipelines;
/// `intermediates` collects the individual pipeline step observations so
/// they can be logged as evidence in their own right.
struct ToolContext {
    SeriesStore& store;
    Toolkit* toolkit = nullptr;
    LlmBackend* llm = nullptr;
    std::vector<Observation>* intermediates = nullptr;
};

struct DispatchResult {
    Observation result;
    std::vector<Observation> intermediate;
};

/// Typed registry of the analytical tools: the agent's only access to the
/// data. Dispatch never throws; every failure becomes an error observation
/// carrying the tool's parameter schema.
class Toolkit {
public:
    using Impl = std::function<Observation(const Json& args, ToolContext& ctx)>;

    void add(ToolSpec spec, Impl impl);

    const ToolSpec* find(std::string_view name) const;
    std::vector<std::string> names() const;  // registry order
    std::size_t size() const { return specs_.size(); }

    /// JSON catalog of all tool schemas; also renders the tool-description
    /// block of the reasoner prompt.
    Json catalog() const;
    std::string catalog_text() const;

    /// Bind a raw Action Input string against a spec: a JSON object is taken
    /// as-is; otherwise comma-separated positional values are mapped to the
    /// required parameters in declared order, with surplus tokens matched
    /// against optional parameters by type. Surplus tokens that fit no
    /// optional slot collapse into the leading series parameter as a list,
    /// which lets single-series tools report the misuse themselves.
    Json bind_args(const ToolSpec& spec, const std::string& raw) const;

    DispatchResult dispatch(const ToolCall& call, SeriesStore& store, LlmBackend* llm = nullptr);

    /// Parse + bind + dispatch in one step (what the agent loop uses).
    DispatchResult dispatch_raw(const std::string& tool, const std::string& raw_args,
                                SeriesStore& store, LlmBackend* llm = nullptr);

    /// The complete standard library of tools.
    static Toolkit standard();

private:
    Json validate_args(const ToolSpec& spec, const Json& args) const;

    std::vector<ToolSpec> specs_;
    std::vector<Impl> impls_;
    std::map<std::string, std::size_t, std::less<>> by_name_;
};

void register_processing_tools(Toolkit& toolkit);
void register_detection_tools(Toolkit& toolkit);
void register_numeric_tools(Toolkit& toolkit);
void register_relation_tools(Toolkit& toolkit);
void register_custom_operator(Toolkit& toolkit);

}  // namespace tsr
