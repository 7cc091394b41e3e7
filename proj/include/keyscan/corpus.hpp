#ifndef KEYSCAN_CORPUS_HPP
#define KEYSCAN_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "keyscan/callgraph.hpp"
#include "keyscan/party.hpp"
#include "keyscan/sigdb.hpp"

namespace keyscan {

inline constexpr int kResultSchemaVersion = 1;

struct SchemaVersionMismatch : std::runtime_error {
    explicit SchemaVersionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct CorruptResult : std::runtime_error {
    explicit CorruptResult(const std::string& what) : std::runtime_error(what) {}
};

// One scanned app, as persisted to its result file.
struct AppResult {
    std::string app_id;
    std::string developer;
    std::int64_t installs = 0;
    std::string genre;
    std::string version;
    std::string source_dir;
    std::string scanned_at;
    PrefilterResult prefilter;
    std::vector<ApiCallSite> call_sites;
    std::vector<ReachabilityResult> reachability;
    std::vector<std::string> warnings;
};

struct ApkRecord {
    std::string app_id;
    std::string developer;
    std::int64_t installs = 0;
    std::string genre;
    std::string version;
    std::string result_path;
    std::string scanned_at;
};

struct PackageEntry {
    std::string name;
    bool obfuscated = false;
    std::set<std::string> referencing_apps;
    std::set<std::string> developers;
    Party party = Party::Withheld;
};

struct ConfigSnapshot {
    int bfs_node_limit = 1000;
    int obfuscation_min_component = 3;
    std::int64_t min_installs_filter = 10000;
    bool cha_enabled = false;
    std::vector<std::string> needle_set;
};

struct CorpusManifest {
    ConfigSnapshot config_snapshot;
    std::vector<ApkRecord> apps;  // sorted by app_id
    std::map<std::string, PackageEntry> package_index;
};

// A package name is non-obfuscated iff at least one dot-separated component
// has length >= min_component_len.
bool is_obfuscated(const std::string& package_name, int min_component_len = 3);

struct PackageClassification {
    std::map<std::string, PackageEntry> index;
    std::vector<std::string> diagnostics;  // missing-developer bucket
};

// Indexes the packages containing keystore key-generation constructor call
// sites across the corpus and classifies each as first/third party.
// Deterministic in the multiset {(package, developer)}.
PackageClassification classify_packages(const std::vector<AppResult>& results,
                                        int obfuscation_min_component = 3);

// Classifies every package defined by any app in the corpus (superset of the
// manifest index); reachability queries need a total party map.
PartyMap classify_all_packages(
    const std::vector<std::pair<std::string, std::set<std::string>>>& app_developer_packages,
    int obfuscation_min_component = 3);

void persist_result(const AppResult& result, const std::filesystem::path& path);
AppResult load_result(const std::filesystem::path& path);

// Sorted result files (*.json) under a directory.
std::vector<std::filesystem::path> list_result_files(const std::filesystem::path& dir);

CorpusManifest build_manifest(const std::vector<std::filesystem::path>& result_files,
                              const std::filesystem::path& relative_to,
                              const ConfigSnapshot& snapshot,
                              std::vector<std::string>* diagnostics = nullptr);

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

}  // namespace keyscan

#endif
