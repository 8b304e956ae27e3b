#include "tsreason/toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsr {

namespace {

bool parse_full_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(text, &used);
    } catch (...) {
        return false;
    }
    return used == text.size();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

const char* param_type_name(ParamType t) {
    switch (t) {
        case ParamType::Series: return "series";
        case ParamType::Channel: return "channel";
        case ParamType::Number: return "number";
        case ParamType::Integer: return "integer";
        case ParamType::IntList: return "int_list";
        case ParamType::Text: return "text";
        case ParamType::Choice: return "choice";
    }
    return "?";
}

}  // namespace

std::string to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Series: return "series";
        case ValueKind::Real: return "real";
        case ValueKind::Category: return "category";
        case ValueKind::IndexSet: return "index_set";
        case ValueKind::Relation: return "relation";
        case ValueKind::Meta: return "meta";
        case ValueKind::Error: return "error";
    }
    return "?";
}

ValueKind value_kind_from_string(const std::string& text) {
    if (text == "series") return ValueKind::Series;
    if (text == "real") return ValueKind::Real;
    if (text == "category") return ValueKind::Category;
    if (text == "index_set") return ValueKind::IndexSet;
    if (text == "relation") return ValueKind::Relation;
    if (text == "meta") return ValueKind::Meta;
    if (text == "error") return ValueKind::Error;
    throw std::invalid_argument("unknown value kind: " + text);
}

std::string to_string(ToolFamily family) {
    switch (family) {
        case ToolFamily::Processing: return "proc";
        case ToolFamily::Detection: return "det";
        case ToolFamily::Numeric: return "num";
        case ToolFamily::Relation: return "rel";
        case ToolFamily::Custom: return "custom";
    }
    return "?";
}

Json ToolCall::to_json() const { return Json{{"tool", tool}, {"args", args}}; }

ToolCall ToolCall::from_json(const Json& doc) {
    ToolCall call;
    call.tool = doc.at("tool").get<std::string>();
    call.args = doc.value("args", Json::object());
    return call;
}

std::string Observation::error_message() const {
    if (!is_error()) return "";
    if (value.is_object() && value.contains("message"))
        return value.at("message").get<std::string>();
    return value.dump();
}

Json Observation::to_json() const {
    Json doc;
    doc["kind"] = to_string(kind);
    doc["value"] = value;
    doc["diagnostics"] = diagnostics;
    doc["source"] = source.to_json();
    doc["seq"] = seq;
    return doc;
}

Observation Observation::from_json(const Json& doc) {
    Observation obs;
    obs.kind = value_kind_from_string(doc.at("kind").get<std::string>());
    obs.value = doc.at("value");
    obs.diagnostics = doc.value("diagnostics", Json::object());
    obs.source = ToolCall::from_json(doc.at("source"));
    obs.seq = doc.value("seq", std::uint64_t{0});
    return obs;
}

Json ParamSpec::to_json() const {
    Json doc;
    doc["name"] = name;
    doc["type"] = param_type_name(type);
    doc["required"] = required;
    if (!choices.empty()) doc["choices"] = choices;
    return doc;
}

Json ToolSpec::to_json() const {
    Json doc;
    doc["name"] = name;
    doc["family"] = to_string(family);
    doc["description"] = description;
    doc["output"] = to_string(output);
    Json params = Json::array();
    for (const auto& p : parameters) params.push_back(p.to_json());
    doc["parameters"] = std::move(params);
    return doc;
}

std::string ToolSpec::usage() const {
    std::ostringstream out;
    out << "{'parameters': [";
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (i) out << ", ";
        out << "{'name': '" << parameters[i].name << "', 'required': "
            << (parameters[i].required ? "True" : "False") << "}";
    }
    out << "]}";
    return out.str();
}

const ParamSpec* ToolSpec::find_param(std::string_view param) const {
    for (const auto& p : parameters) {
        if (p.name == param) return &p;
    }
    return nullptr;
}

void Toolkit::add(ToolSpec spec, Impl impl) {
    if (by_name_.contains(spec.name))
        throw std::invalid_argument("tool already registered: " + spec.name);
    if (spec.description.empty())
        throw std::invalid_argument("tool description must be non-empty: " + spec.name);
    by_name_.emplace(spec.name, specs_.size());
    specs_.push_back(std::move(spec));
    impls_.push_back(std::move(impl));
}

const ToolSpec* Toolkit::find(std::string_view name) const {
    const auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &specs_[it->second];
}

std::vector<std::string> Toolkit::names() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& s : specs_) out.push_back(s.name);
    return out;
}

Json Toolkit::catalog() const {
    Json doc = Json::array();
    for (const auto& s : specs_) doc.push_back(s.to_json());
    return doc;
}

std::string Toolkit::catalog_text() const { return catalog().dump(2); }

Json Toolkit::validate_args(const ToolSpec& spec, const Json& args) const {
    if (!args.is_object()) throw ToolError("arguments must be an object");
    Json normalized = Json::object();
    for (const auto& [key, raw] : args.items()) {
        const ParamSpec* param = spec.find_param(key);
        if (!param)
            throw ToolError("unexpected argument \"" + key + "\" for tool \"" + spec.name + "\"");
        Json val = raw;
        switch (param->type) {
            case ParamType::Series: {
                if (val.is_array()) {
                    for (const auto& item : val) {
                        if (!item.is_string())
                            throw ToolError("argument \"" + key + "\" must name series");
                    }
                } else if (!val.is_string()) {
                    throw ToolError("argument \"" + key + "\" must be a series name");
                }
                break;
            }
            case ParamType::Channel: {
                if (!val.is_string() && !val.is_number_integer())
                    throw ToolError("argument \"" + key + "\" must be a channel name or index");
                break;
            }
            case ParamType::Number:
            case ParamType::Integer: {
                if (val.is_string()) {
                    double parsed = 0.0;
                    if (!parse_full_double(val.get<std::string>(), parsed))
                        throw ToolError("argument \"" + key + "\" must be numeric, got \"" +
                                        val.get<std::string>() + "\"");
                    val = parsed;
                }
                if (!val.is_number())
                    throw ToolError("argument \"" + key + "\" must be numeric");
                if (param->type == ParamType::Integer) {
                    const double d = val.get<double>();
                    if (d != std::floor(d))
                        throw ToolError("argument \"" + key + "\" must be an integer");
                    val = static_cast<std::int64_t>(d);
                }
                break;
            }
            case ParamType::IntList: {
                if (val.is_string()) {
                    // "3,3,4" style
                    Json list = Json::array();
                    std::string tok;
                    for (char ch : val.get<std::string>() + ",") {
                        if (ch == ',') {
                            const std::string t = trim(tok);
                            tok.clear();
                            if (t.empty()) continue;
                            double parsed = 0.0;
                            if (!parse_full_double(t, parsed) || parsed != std::floor(parsed))
                                throw ToolError("argument \"" + key +
                                                "\" must be a list of integers");
                            list.push_back(static_cast<std::int64_t>(parsed));
                        } else {
                            tok.push_back(ch);
                        }
                    }
                    val = std::move(list);
                }
                if (!val.is_array())
                    throw ToolError("argument \"" + key + "\" must be a list of integers");
                for (auto& item : val) {
                    if (item.is_number_float() &&
                        item.get<double>() == std::floor(item.get<double>()))
                        item = static_cast<std::int64_t>(item.get<double>());
                    if (!item.is_number_integer())
                        throw ToolError("argument \"" + key + "\" must be a list of integers");
                }
                break;
            }
            case ParamType::Text: {
                if (!val.is_string()) val = val.dump();
                break;
            }
            case ParamType::Choice: {
                if (!val.is_string())
                    throw ToolError("argument \"" + key + "\" must be one of the listed choices");
                const auto& choice = val.get_ref<const std::string&>();
                if (std::find(param->choices.begin(), param->choices.end(), choice) ==
                    param->choices.end()) {
                    std::string allowed;
                    for (std::size_t i = 0; i < param->choices.size(); ++i) {
                        if (i) allowed += ", ";
                        allowed += param->choices[i];
                    }
                    throw ToolError("argument \"" + key + "\" must be one of {" + allowed +
                                    "}, got \"" + choice + "\"");
                }
                break;
            }
        }
        normalized[key] = std::move(val);
    }
    for (const auto& p : spec.parameters) {
        if (p.required && !normalized.contains(p.name))
            throw ToolError("missing required argument \"" + p.name + "\"");
    }
    return normalized;
}

Json Toolkit::bind_args(const ToolSpec& spec, const std::string& raw) const {
    const std::string text = trim(raw);
    if (text.empty()) return Json::object();

    // JSON object input is authoritative.
    {
        auto parsed = Json::parse(text, nullptr, false);
        if (!parsed.is_discarded()) {
            if (parsed.is_object()) return parsed;
            if (parsed.is_string()) {
                // single quoted positional value
                Json obj = Json::object();
                if (!spec.parameters.empty()) obj[spec.parameters[0].name] = parsed;
                return obj;
            }
            // arrays and bare scalars fall through to positional handling
        }
    }

    std::string body = text;
    if ((body.front() == '{' && body.back() == '}') ||
        (body.front() == '[' && body.back() == ']'))
        body = body.substr(1, body.size() - 2);

    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : body) {
        if (ch == ',') {
            tokens.push_back(strip_quotes(trim(cur)));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!trim(cur).empty() || tokens.empty()) tokens.push_back(strip_quotes(trim(cur)));

    std::vector<const ParamSpec*> required;
    std::vector<const ParamSpec*> optional;
    for (const auto& p : spec.parameters) (p.required ? required : optional).push_back(&p);

    auto coerce = [](const ParamSpec& p, const std::string& tok) -> std::optional<Json> {
        double num = 0.0;
        switch (p.type) {
            case ParamType::Number:
                if (!parse_full_double(tok, num)) return std::nullopt;
                return Json(num);
            case ParamType::Integer:
                if (!parse_full_double(tok, num) || num != std::floor(num)) return std::nullopt;
                return Json(static_cast<std::int64_t>(num));
            case ParamType::Choice:
                if (std::find(p.choices.begin(), p.choices.end(), tok) == p.choices.end())
                    return std::nullopt;
                return Json(tok);
            case ParamType::Channel:
                if (parse_full_double(tok, num) && num == std::floor(num))
                    return Json(static_cast<std::int64_t>(num));
                return Json(tok);
            case ParamType::IntList:
                return std::nullopt;  // lists cannot be bound positionally
            case ParamType::Series:
            case ParamType::Text:
                return Json(tok);
        }
        return std::nullopt;
    };

    if (tokens.size() < required.size()) {
        throw ToolError("expected " + std::to_string(required.size()) +
                        " positional value(s) for tool \"" + spec.name + "\", got " +
                        std::to_string(tokens.size()));
    }

    Json args = Json::object();
    std::size_t t = 0;
    bool ok = true;
    for (const auto* p : required) {
        auto val = coerce(*p, tokens[t]);
        if (!val) {
            ok = false;
            break;
        }
        args[p->name] = *val;
        ++t;
    }
    std::size_t opt_i = 0;
    while (ok && t < tokens.size()) {
        bool placed = false;
        while (opt_i < optional.size()) {
            auto val = coerce(*optional[opt_i], tokens[t]);
            ++opt_i;
            if (val) {
                args[optional[opt_i - 1]->name] = *val;
                placed = true;
                break;
            }
        }
        if (!placed) {
            ok = false;
            break;
        }
        ++t;
    }

    if (!ok) {
        // Leftovers that fit nowhere: treat all tokens as a series list bound
        // to the leading series parameter, so the tool itself reports misuse
        // (e.g. a 1-D tool handed several series).
        if (!spec.parameters.empty() && spec.parameters[0].type == ParamType::Series) {
            Json list = Json::array();
            for (const auto& tok : tokens) list.push_back(tok);
            Json fallback = Json::object();
            fallback[spec.parameters[0].name] = std::move(list);
            return fallback;
        }
        throw ToolError("could not bind positional arguments for tool \"" + spec.name + "\"");
    }
    return args;
}

DispatchResult Toolkit::dispatch(const ToolCall& call, SeriesStore& store, LlmBackend* llm) {
    DispatchResult out;
    const auto it = by_name_.find(call.tool);
    if (it == by_name_.end()) {
        Observation err;
        err.kind = ValueKind::Error;
        std::string known;
        for (const auto& s : specs_) {
            if (!known.empty()) known += ", ";
            known += s.name;
        }
        err.value = Json{{"message", "unknown tool \"" + call.tool +
                                         "\" (registered tools: " + known + ")"}};
        err.source = call;
        out.result = std::move(err);
        return out;
    }
    const ToolSpec& spec = specs_[it->second];
    ToolContext ctx{store, this, llm, &out.intermediate};
    try {
        Json args = validate_args(spec, call.args);
        Observation obs = impls_[it->second](args, ctx);
        obs.source = ToolCall{call.tool, std::move(args)};
        out.result = std::move(obs);
    } catch (const std::exception& e) {
        Observation err;
        err.kind = ValueKind::Error;
        err.value = Json{{"message", e.what()}};
        err.diagnostics = Json{{"usage", spec.usage()}};
        err.source = call;
        out.result = std::move(err);
    }
    return out;
}

DispatchResult Toolkit::dispatch_raw(const std::string& tool, const std::string& raw_args,
                                     SeriesStore& store, LlmBackend* llm) {
    const ToolSpec* spec = find(tool);
    if (!spec) return dispatch(ToolCall{tool, Json::object()}, store, llm);
    try {
        Json args = bind_args(*spec, raw_args);
        return dispatch(ToolCall{tool, std::move(args)}, store, llm);
    } catch (const std::exception& e) {
        DispatchResult out;
        out.result.kind = ValueKind::Error;
        out.result.value = Json{{"message", e.what()}};
        out.result.diagnostics = Json{{"usage", spec->usage()}};
        out.result.source = ToolCall{tool, Json{{"raw", raw_args}}};
        return out;
    }
}

Toolkit Toolkit::standard() {
    Toolkit kit;
    register_processing_tools(kit);
    register_detection_tools(kit);
    register_numeric_tools(kit);
    register_relation_tools(kit);
    register_custom_operator(kit);
    return kit;
}

}  // namespace tsr
