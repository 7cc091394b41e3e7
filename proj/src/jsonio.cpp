#include "keyscan/jsonio.hpp"

namespace keyscan {

using nlohmann::json;

void to_json(json& j, const MethodSignature& s) {
    j = json{{"class", s.class_name},
             {"name", s.method_name},
             {"params", s.param_descriptors},
             {"return", s.return_descriptor}};
}

void from_json(const json& j, MethodSignature& s) {
    j.at("class").get_to(s.class_name);
    j.at("name").get_to(s.method_name);
    j.at("params").get_to(s.param_descriptors);
    j.at("return").get_to(s.return_descriptor);
}

void to_json(json& j, const ResolvedValue& v) {
    j = json::object();
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ResolvedValue::Int>) {
                j["kind"] = "int";
                j["value"] = k.value;
            } else if constexpr (std::is_same_v<T, ResolvedValue::Bool>) {
                j["kind"] = "bool";
                j["value"] = k.value;
            } else if constexpr (std::is_same_v<T, ResolvedValue::Str>) {
                j["kind"] = "str";
                j["value"] = k.value;
            } else if constexpr (std::is_same_v<T, ResolvedValue::StrArray>) {
                j["kind"] = "str-array";
                j["values"] = k.values;
            } else {
                j["kind"] = "unresolved";
                j["reason"] = to_string(k.reason);
            }
        },
        v.kind);
    j["provenance"] = v.provenance;
}

void from_json(const json& j, ResolvedValue& v) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "int") v.kind = ResolvedValue::Int{j.at("value").get<std::int64_t>()};
    else if (kind == "bool") v.kind = ResolvedValue::Bool{j.at("value").get<bool>()};
    else if (kind == "str") v.kind = ResolvedValue::Str{j.at("value").get<std::string>()};
    else if (kind == "str-array")
        v.kind = ResolvedValue::StrArray{j.at("values").get<std::vector<std::string>>()};
    else if (kind == "unresolved")
        v.kind = ResolvedValue::Unresolved{
            unresolved_reason_from_string(j.at("reason").get<std::string>())};
    else throw std::invalid_argument("unknown value kind: " + kind);
    v.provenance = j.value("provenance", std::vector<int>{});
}

void to_json(json& j, const PrefilterHit& h) {
    j = json{{"needle", h.needle}, {"file", h.file}, {"line", h.line}};
}

void from_json(const json& j, PrefilterHit& h) {
    j.at("needle").get_to(h.needle);
    j.at("file").get_to(h.file);
    j.at("line").get_to(h.line);
}

void to_json(json& j, const PrefilterResult& r) {
    j = json{{"matched", r.matched}, {"hits", r.hits}, {"warnings", r.warnings}};
}

void from_json(const json& j, PrefilterResult& r) {
    j.at("matched").get_to(r.matched);
    j.at("hits").get_to(r.hits);
    r.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(json& j, const ApiCallSite& s) {
    json args = json::array();
    for (const auto& a : s.resolved_args) args.push_back(json{{"index", a.index}, {"value", a.value}});
    j = json{{"callsite_id", s.callsite_id},
             {"callee", s.callee},
             {"caller", s.caller},
             {"caller_package", s.caller_package},
             {"source_line", s.source_line},
             {"resolved_args", args},
             {"receiver_group", s.receiver_group}};
}

void from_json(const json& j, ApiCallSite& s) {
    j.at("callsite_id").get_to(s.callsite_id);
    j.at("callee").get_to(s.callee);
    j.at("caller").get_to(s.caller);
    j.at("caller_package").get_to(s.caller_package);
    j.at("source_line").get_to(s.source_line);
    s.resolved_args.clear();
    for (const auto& a : j.at("resolved_args")) {
        ApiCallSite::ResolvedArg arg;
        a.at("index").get_to(arg.index);
        a.at("value").get_to(arg.value);
        s.resolved_args.push_back(std::move(arg));
    }
    s.receiver_group = j.value("receiver_group", std::string());
}

void to_json(json& j, const ReachabilityResult& r) {
    j = json{{"callsite_id", r.callsite_id},
             {"reachable", r.reachable},
             {"evidence_path", r.evidence_path},
             {"visited_count", r.visited_count},
             {"truncated", r.truncated}};
}

void from_json(const json& j, ReachabilityResult& r) {
    j.at("callsite_id").get_to(r.callsite_id);
    j.at("reachable").get_to(r.reachable);
    j.at("evidence_path").get_to(r.evidence_path);
    j.at("visited_count").get_to(r.visited_count);
    j.at("truncated").get_to(r.truncated);
}

void to_json(json& j, const AppResult& r) {
    j = json{{"schema_version", kResultSchemaVersion},
             {"app_id", r.app_id},
             {"developer", r.developer},
             {"installs", r.installs},
             {"genre", r.genre},
             {"version", r.version},
             {"source_dir", r.source_dir},
             {"scanned_at", r.scanned_at},
             {"prefilter", r.prefilter},
             {"call_sites", r.call_sites},
             {"reachability", r.reachability},
             {"warnings", r.warnings}};
}

void from_json(const json& j, AppResult& r) {
    int version = j.at("schema_version").get<int>();
    if (version != kResultSchemaVersion)
        throw SchemaVersionMismatch("result schema_version " + std::to_string(version) +
                                    ", expected " + std::to_string(kResultSchemaVersion));
    j.at("app_id").get_to(r.app_id);
    j.at("developer").get_to(r.developer);
    j.at("installs").get_to(r.installs);
    j.at("genre").get_to(r.genre);
    r.version = j.value("version", std::string());
    r.source_dir = j.value("source_dir", std::string());
    r.scanned_at = j.value("scanned_at", std::string());
    j.at("prefilter").get_to(r.prefilter);
    j.at("call_sites").get_to(r.call_sites);
    j.at("reachability").get_to(r.reachability);
    j.at("warnings").get_to(r.warnings);
}

void to_json(json& j, const ApkRecord& r) {
    j = json{{"app_id", r.app_id},     {"developer", r.developer},
             {"installs", r.installs}, {"genre", r.genre},
             {"version", r.version},   {"result_path", r.result_path},
             {"scanned_at", r.scanned_at}};
}

void from_json(const json& j, ApkRecord& r) {
    j.at("app_id").get_to(r.app_id);
    j.at("developer").get_to(r.developer);
    j.at("installs").get_to(r.installs);
    j.at("genre").get_to(r.genre);
    j.at("version").get_to(r.version);
    j.at("result_path").get_to(r.result_path);
    j.at("scanned_at").get_to(r.scanned_at);
}

void to_json(json& j, const PackageEntry& e) {
    j = json{{"name", e.name},
             {"obfuscated", e.obfuscated},
             {"referencing_apps", e.referencing_apps},
             {"developers", e.developers},
             {"party", to_string(e.party)}};
}

void from_json(const json& j, PackageEntry& e) {
    j.at("name").get_to(e.name);
    j.at("obfuscated").get_to(e.obfuscated);
    j.at("referencing_apps").get_to(e.referencing_apps);
    j.at("developers").get_to(e.developers);
    e.party = party_from_string(j.at("party").get<std::string>());
}

void to_json(json& j, const ConfigSnapshot& c) {
    j = json{{"bfs_node_limit", c.bfs_node_limit},
             {"obfuscation_min_component", c.obfuscation_min_component},
             {"min_installs_filter", c.min_installs_filter},
             {"cha_enabled", c.cha_enabled},
             {"needle_set", c.needle_set}};
}

void from_json(const json& j, ConfigSnapshot& c) {
    j.at("bfs_node_limit").get_to(c.bfs_node_limit);
    j.at("obfuscation_min_component").get_to(c.obfuscation_min_component);
    j.at("min_installs_filter").get_to(c.min_installs_filter);
    j.at("cha_enabled").get_to(c.cha_enabled);
    j.at("needle_set").get_to(c.needle_set);
}

void to_json(json& j, const CorpusManifest& m) {
    j = json{{"config_snapshot", m.config_snapshot},
             {"apps", m.apps},
             {"package_index", m.package_index}};
}

void from_json(const json& j, CorpusManifest& m) {
    j.at("config_snapshot").get_to(m.config_snapshot);
    j.at("apps").get_to(m.apps);
    j.at("package_index").get_to(m.package_index);
}

}  // namespace keyscan
