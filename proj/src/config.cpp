#include "keyscan/config.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "keyscan/util.hpp"

namespace keyscan {

void Config::validate() const {
    if (bfs_node_limit < 1) throw std::invalid_argument("bfs_node_limit must be >= 1");
    if (obfuscation_min_component < 1)
        throw std::invalid_argument("obfuscation_min_component must be >= 1");
    if (per_app_timeout_minutes < 1)
        throw std::invalid_argument("per_app_timeout_minutes must be >= 1");
    if (min_installs_filter < 1) throw std::invalid_argument("min_installs_filter must be >= 1");
    if (needle_set.empty()) throw std::invalid_argument("needle_set must not be empty");
}

ConfigSnapshot Config::snapshot() const {
    ConfigSnapshot s;
    s.bfs_node_limit = bfs_node_limit;
    s.obfuscation_min_component = obfuscation_min_component;
    s.min_installs_filter = min_installs_filter;
    s.cha_enabled = cha_enabled;
    s.needle_set = needle_set;
    return s;
}

SignatureDb Config::load_db() const {
    if (signature_db_path.empty()) return SignatureDb::builtin_default();
    return SignatureDb::from_file(signature_db_path);
}

namespace {

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("bad boolean: " + value);
}

void apply_kv(Config& config, const std::string& key, const std::string& value) {
    if (key == "bfs_node_limit") config.bfs_node_limit = std::stoi(value);
    else if (key == "obfuscation_min_component") config.obfuscation_min_component = std::stoi(value);
    else if (key == "per_app_timeout_minutes") config.per_app_timeout_minutes = std::stoi(value);
    else if (key == "needle_set") {
        config.needle_set.clear();
        for (const auto& piece : split(value, ';')) {
            auto needle = trim(piece);
            if (!needle.empty()) config.needle_set.push_back(needle);
        }
    } else if (key == "signature_db_path") config.signature_db_path = value;
    else if (key == "min_installs_filter") config.min_installs_filter = std::stoll(value);
    else if (key == "cha_enabled") config.cha_enabled = parse_bool(value);
    else throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

Config load_config_file(const std::filesystem::path& path, Config base) {
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        try {
            apply_kv(base, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

Config apply_env_overrides(Config base) {
    static const std::pair<const char*, const char*> kVars[] = {
        {"KEYSCAN_BFS_NODE_LIMIT", "bfs_node_limit"},
        {"KEYSCAN_OBFUSCATION_MIN_COMPONENT", "obfuscation_min_component"},
        {"KEYSCAN_PER_APP_TIMEOUT_MINUTES", "per_app_timeout_minutes"},
        {"KEYSCAN_NEEDLE_SET", "needle_set"},
        {"KEYSCAN_SIGNATURE_DB_PATH", "signature_db_path"},
        {"KEYSCAN_MIN_INSTALLS_FILTER", "min_installs_filter"},
        {"KEYSCAN_CHA_ENABLED", "cha_enabled"},
    };
    for (const auto& [env_name, key] : kVars) {
        const char* value = std::getenv(env_name);
        if (value) apply_kv(base, key, value);
    }
    return base;
}

}  // namespace keyscan
