#include "keyscan/corpus.hpp"

#include <algorithm>

#include "keyscan/jsonio.hpp"
#include "keyscan/util.hpp"

namespace keyscan {

using nlohmann::json;

bool is_obfuscated(const std::string& package_name, int min_component_len) {
    for (const auto& component : split(package_name, '.')) {
        if (static_cast<int>(component.size()) >= min_component_len) return false;
    }
    return true;
}

PackageClassification classify_packages(const std::vector<AppResult>& results,
                                        int obfuscation_min_component) {
    PackageClassification out;
    // init-bearing packages only: the index covers packages containing a call
    // to the key generation constructor
    std::map<std::string, std::set<std::string>> missing_dev_apps;
    for (const auto& result : results) {
        for (const auto& site : result.call_sites) {
            if (site.callee != "kgps.init") continue;
            PackageEntry& entry = out.index[site.caller_package];
            entry.name = site.caller_package;
            entry.obfuscated = is_obfuscated(site.caller_package, obfuscation_min_component);
            entry.referencing_apps.insert(result.app_id);
            if (result.developer.empty())
                missing_dev_apps[site.caller_package].insert(result.app_id);
            else
                entry.developers.insert(result.developer);
        }
    }
    for (auto& [name, entry] : out.index) {
        if (entry.obfuscated) {
            entry.party = Party::ExcludedObfuscated;
        } else if (missing_dev_apps.count(name)) {
            entry.party = Party::Withheld;
            for (const auto& app : missing_dev_apps[name])
                out.diagnostics.push_back("missing developer for app " + app + " (package " +
                                          name + "): party withheld");
        } else {
            entry.party = entry.developers.size() >= 2 ? Party::Third : Party::First;
        }
    }
    std::sort(out.diagnostics.begin(), out.diagnostics.end());
    return out;
}

PartyMap classify_all_packages(
    const std::vector<std::pair<std::string, std::set<std::string>>>& app_developer_packages,
    int obfuscation_min_component) {
    std::map<std::string, std::set<std::string>> developers_of;
    for (const auto& [developer, packages] : app_developer_packages)
        for (const auto& pkg : packages) developers_of[pkg].insert(developer);
    PartyMap map;
    for (const auto& [pkg, devs] : developers_of) {
        if (is_obfuscated(pkg, obfuscation_min_component)) map[pkg] = Party::ExcludedObfuscated;
        else if (devs.count("")) map[pkg] = Party::Withheld;
        else map[pkg] = devs.size() >= 2 ? Party::Third : Party::First;
    }
    return map;
}

void persist_result(const AppResult& result, const std::filesystem::path& path) {
    json j = result;
    write_file_atomic(path, j.dump(2) + "\n");
}

AppResult load_result(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw CorruptResult("unparsable result file " + path.string() + ": " + e.what());
    }
    try {
        return j.get<AppResult>();
    } catch (const SchemaVersionMismatch&) {
        throw;
    } catch (const json::exception& e) {
        throw CorruptResult("result file " + path.string() + " missing fields: " + e.what());
    }
}

std::vector<std::filesystem::path> list_result_files(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    if (!fs::exists(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    return files;
}

CorpusManifest build_manifest(const std::vector<std::filesystem::path>& result_files,
                              const std::filesystem::path& relative_to,
                              const ConfigSnapshot& snapshot,
                              std::vector<std::string>* diagnostics) {
    CorpusManifest manifest;
    manifest.config_snapshot = snapshot;
    std::vector<AppResult> results;
    for (const auto& file : result_files) {
        AppResult r = load_result(file);
        ApkRecord record;
        record.app_id = r.app_id;
        record.developer = r.developer;
        record.installs = r.installs;
        record.genre = r.genre;
        record.version = r.version;
        std::error_code ec;
        auto rel = std::filesystem::relative(file, relative_to, ec);
        record.result_path = ec ? file.generic_string() : rel.generic_string();
        record.scanned_at = r.scanned_at;
        manifest.apps.push_back(std::move(record));
        results.push_back(std::move(r));
    }
    std::sort(manifest.apps.begin(), manifest.apps.end(),
              [](const ApkRecord& a, const ApkRecord& b) { return a.app_id < b.app_id; });
    auto classification = classify_packages(results, snapshot.obfuscation_min_component);
    manifest.package_index = std::move(classification.index);
    if (diagnostics) *diagnostics = std::move(classification.diagnostics);
    return manifest;
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
    json j = manifest;
    write_file_atomic(path, j.dump(2) + "\n");
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw CorruptResult("unparsable manifest " + path.string() + ": " + e.what());
    }
    return j.get<CorpusManifest>();
}

}  // namespace keyscan
