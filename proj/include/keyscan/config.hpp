#ifndef KEYSCAN_CONFIG_HPP
#define KEYSCAN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "keyscan/corpus.hpp"
#include "keyscan/sigdb.hpp"

namespace keyscan {

// Pipeline configuration. Resolution order: defaults, then config file, then
// KEYSCAN_* environment variables, then command-line flags.
struct Config {
    int bfs_node_limit = 1000;
    int obfuscation_min_component = 3;
    int per_app_timeout_minutes = 30;
    std::vector<std::string> needle_set = kDefaultNeedles;
    std::string signature_db_path;  // empty = built-in default set
    std::int64_t min_installs_filter = 10000;
    bool cha_enabled = false;

    // test hook: when >= 0, overrides per_app_timeout_minutes at
    // millisecond granularity
    std::int64_t timeout_ms_override = -1;

    std::int64_t effective_timeout_ms() const {
        return timeout_ms_override >= 0 ? timeout_ms_override
                                        : std::int64_t{per_app_timeout_minutes} * 60'000;
    }

    void validate() const;  // limits must be >= 1
    ConfigSnapshot snapshot() const;
    SignatureDb load_db() const;
};

// key=value lines; '#' starts a comment. Unknown keys are an error.
Config load_config_file(const std::filesystem::path& path, Config base = {});
// KEYSCAN_BFS_NODE_LIMIT, KEYSCAN_OBFUSCATION_MIN_COMPONENT, ...
Config apply_env_overrides(Config base);

}  // namespace keyscan

#endif
