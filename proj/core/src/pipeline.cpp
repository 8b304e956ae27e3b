#include <algorithm>
#include <memory>

#include "tool_support.hpp"
#include "tsreason/llm.hpp"
#include "tsreason/toolkit.hpp"

namespace tsr {

namespace {

using namespace toolsupport;

// Synthesized operators are declarative pipelines over existing tools, never
// free-form code: every step stays individually validated, auditable in the
// evidence log, and safe to replay.
constexpr const char* kSynthesisInstructions =
    "You define new time-series operators by composing existing tools.\n"
    "Respond with a single JSON object and nothing else:\n"
    "{\n"
    "  \"name\": \"<snake_case_operator_name>\",\n"
    "  \"description\": \"<one line>\",\n"
    "  \"steps\": [ {\"tool\": \"<tool name>\", \"args\": { ... }} ]\n"
    "}\n"
    "In step args, use \"$input\" for the series the operator is applied to\n"
    "and \"$prev\" for the series produced by the previous step.\n"
    "Available tools:\n";

struct PipelineStep {
    std::string tool;
    Json args;
};

struct Pipeline {
    std::string name;
    std::string description;
    std::vector<PipelineStep> steps;
};

Pipeline parse_pipeline(const Json& doc, const Toolkit& kit) {
    if (!doc.is_object() || !doc.contains("name") || !doc.contains("steps"))
        throw ToolError("pipeline must be an object with name and steps");
    Pipeline pipe;
    pipe.name = doc.at("name").get<std::string>();
    pipe.description = doc.value("description", "synthesized operator");
    if (pipe.name.empty()) throw ToolError("pipeline name must be non-empty");
    if (kit.find(pipe.name)) throw ToolError("pipeline name collides with tool \"" + pipe.name + "\"");
    if (!doc.at("steps").is_array() || doc.at("steps").empty())
        throw ToolError("pipeline needs a non-empty list of steps");
    for (const auto& raw : doc.at("steps")) {
        PipelineStep step;
        step.tool = raw.at("tool").get<std::string>();
        step.args = raw.value("args", Json::object());
        const ToolSpec* spec = kit.find(step.tool);
        if (!spec) throw ToolError("pipeline references unknown tool \"" + step.tool + "\"");
        if (spec->family == ToolFamily::Custom)
            throw ToolError("pipelines cannot nest custom operators");
        if (!step.args.is_object()) throw ToolError("step args must be an object");
        for (const auto& [key, _] : step.args.items()) {
            if (!spec->find_param(key))
                throw ToolError("step for tool \"" + step.tool +
                                "\" has unexpected argument \"" + key + "\"");
        }
        pipe.steps.push_back(std::move(step));
    }
    return pipe;
}

Json substitute(const Json& args, const std::string& input, const std::string& prev) {
    Json out = args;
    for (auto& [key, val] : out.items()) {
        (void)key;
        if (val.is_string()) {
            if (val.get<std::string>() == "$input") val = input;
            if (val.get<std::string>() == "$prev") {
                if (prev.empty())
                    throw ToolError("$prev used in the first pipeline step");
                val = prev;
            }
        }
    }
    return out;
}

Observation run_pipeline(const Pipeline& pipe, const Json& args, ToolContext& ctx) {
    const std::string input = series_arg(args, "name");
    std::string prev;
    Observation last;
    for (const auto& step : pipe.steps) {
        ToolCall call{step.tool, substitute(step.args, input, prev)};
        auto sub = ctx.toolkit->dispatch(call, ctx.store, ctx.llm);
        if (ctx.intermediates)
            ctx.intermediates->push_back(sub.result);
        if (sub.result.is_error())
            throw ToolError("pipeline step \"" + step.tool + "\" failed: " +
                            sub.result.error_message());
        last = sub.result;
        if (last.kind == ValueKind::Series && last.value.is_object() &&
            last.value.contains("name"))
            prev = last.value.at("name").get<std::string>();
    }
    Observation out = last;
    out.diagnostics["pipeline"] = pipe.name;
    out.diagnostics["steps"] = pipe.steps.size();
    return out;
}

Observation custom_operator(const Json& args, ToolContext& ctx) {
    if (!ctx.llm) throw ToolError("custom_operator needs an LLM backend");
    const std::string prompt = args.at("prompt").get<std::string>();

    std::string instructions = kSynthesisInstructions;
    for (const auto& name : ctx.toolkit->names()) {
        const ToolSpec* spec = ctx.toolkit->find(name);
        if (spec->family == ToolFamily::Custom) continue;
        instructions += "- " + name + " " + spec->usage() + "\n";
    }
    std::string reply;
    try {
        reply = ctx.llm->complete({{"system", instructions}, {"user", prompt}});
    } catch (const TransportError&) {
        throw;  // hard backend failures abort the run, they are not tool errors
    }

    // tolerate fenced or prefixed output: take the outermost {...}
    const auto lo = reply.find('{');
    const auto hi = reply.rfind('}');
    if (lo == std::string::npos || hi == std::string::npos || hi < lo)
        throw ToolError("synthesized operator is not valid JSON");
    Json doc = Json::parse(reply.substr(lo, hi - lo + 1), nullptr, false);
    if (doc.is_discarded()) throw ToolError("synthesized operator is not valid JSON");

    Pipeline pipe = parse_pipeline(doc, *ctx.toolkit);
    const ValueKind output = [&] {
        const ToolSpec* last = ctx.toolkit->find(pipe.steps.back().tool);
        return last->output;
    }();

    ToolSpec spec{pipe.name,
                  ToolFamily::Custom,
                  {{"name", ParamType::Series, true, {}}},
                  output,
                  pipe.description};
    auto shared = std::make_shared<Pipeline>(std::move(pipe));
    ctx.toolkit->add(spec, [shared](const Json& call_args, ToolContext& call_ctx) {
        return run_pipeline(*shared, call_args, call_ctx);
    });

    Observation obs;
    obs.kind = ValueKind::Meta;
    obs.value = Json{{"registered", spec.name},
                     {"description", spec.description},
                     {"steps", doc.at("steps")}};
    return obs;
}

}  // namespace

void register_custom_operator(Toolkit& kit) {
    kit.add({"custom_operator",
             ToolFamily::Custom,
             {{"prompt", ParamType::Text, true, {}}},
             ValueKind::Meta,
             "Synthesize a new named operator from a natural-language description as a "
             "validated pipeline of existing tools."},
            custom_operator);
}

}  // namespace tsr
