#ifndef KEYSCAN_ANALYTICS_HPP
#define KEYSCAN_ANALYTICS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "keyscan/corpus.hpp"
#include "keyscan/labels.hpp"
#include "keyscan/slicer.hpp"

namespace keyscan {

struct EmptyCorpus : std::runtime_error {
    EmptyCorpus() : std::runtime_error("corpus has no apps") {}
};
struct UnwritableOutput : std::runtime_error {
    explicit UnwritableOutput(const std::string& what) : std::runtime_error(what) {}
};

// One assembled key-generation configuration (builder chain scope).
struct KeyConfig {
    std::string app_id;
    MethodSignature method;  // assembly scope
    std::optional<std::string> alias;
    std::optional<PurposeSet> purposes;
    std::optional<std::int64_t> key_size;
    std::vector<std::string> block_modes;
    std::vector<std::string> encryption_paddings;
    std::vector<std::string> signature_paddings;
    std::vector<std::string> digests;
    std::optional<bool> strongbox;
    std::optional<bool> auth_required;
    std::optional<std::int64_t> auth_validity_seconds;
    std::optional<bool> randomized_encryption;  // absent = platform default true
    bool attestation = false;
    std::optional<bool> user_confirmation;
    std::optional<std::string> cipher;
    bool has_init = false;
    double completeness = 0.0;  // fraction of member sites whose args resolved
    std::vector<std::string> callsite_ids;
};

struct AssemblyResult {
    std::vector<KeyConfig> configs;
    int unreachable_sites = 0;      // excluded from assembly
    int unresolved_arg_sites = 0;   // setter present, argument unresolved
};

// Groups setter sites per containing method and links builder chains sharing
// a receiver def chain with an init site. Sites flagged unreachable are
// excluded and counted separately.
AssemblyResult assemble_key_configs(const AppResult& result);

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 0;
    double percent() const { return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / den; }
    bool operator==(const Fraction&) const = default;
};

// Auth validity histogram buckets, in fixed order.
inline constexpr const char* kAuthBuckets[] = {"per-use", "<=3s", "5s", "1h", "other"};
int auth_bucket_of(std::int64_t seconds);

struct GenreRow {
    std::string genre;
    std::int64_t apps = 0;
    Fraction keystore;   // apps with any keystore reference
    Fraction strongbox;  // apps with any strongbox call site
    bool operator==(const GenreRow&) const = default;
};

struct CorpusStats {
    std::int64_t total_apps = 0;
    Fraction apps_with_keystore_ref;                           // (a)
    std::optional<Fraction> sensitive_apps_with_keystore_ref;  // (b)
    Fraction strongbox_ref_apps;                               // (c)
    Fraction strongbox_arg_true;                               // (d)
    Fraction strongbox_arg_false;
    Fraction apps_strongbox_requested;       // (e)
    Fraction apps_strongbox_only_unresolved;
    Fraction init_first_party;  // (f) over classified non-obfuscated init sites
    Fraction init_third_party;
    Fraction init_excluded_obfuscated;  // over all init sites
    std::vector<std::pair<std::string, std::int64_t>> top_third_party_packages;  // (g)
    std::map<std::string, Fraction> purpose_distribution;                        // (h)
    Fraction auth_required_true;                                                 // (i)
    std::array<std::int64_t, 5> auth_validity_hist = {};
    Fraction randomized_encryption_disabled;  // (j)
    Fraction attestation_fraction;            // (k)
    std::map<std::string, std::int64_t> cipher_distribution;  // (l)
    std::vector<GenreRow> genre_breakdown;                    // (m)
    std::int64_t sites_reachable = 0;
    std::int64_t sites_unreachable = 0;
    std::int64_t sites_truncated = 0;

    bool operator==(const CorpusStats&) const = default;
};

struct StatsOptions {
    int top_n = 10;
};

CorpusStats compute_stats(const CorpusManifest& manifest,
                          const std::vector<AppResult>& results,
                          const std::vector<DataSafetyLabel>* labels = nullptr,
                          const StatsOptions& options = {});

enum class LintSeverity { Info, Warn, High };
std::string to_string(LintSeverity s);

struct LintFinding {
    std::string app_id;
    std::string key_ref;  // method scope + alias when known
    std::string rule_id;
    LintSeverity severity = LintSeverity::Info;
    std::string message;
};

// Fixed rule table R1..R6; rules are independent, findings are the union of
// per-rule evaluations.
std::vector<LintFinding> lint_config(const KeyConfig& key);
std::vector<LintFinding> lint_single_rule(const KeyConfig& key, const std::string& rule_id);
extern const std::vector<std::string> kLintRuleIds;

// report.json plus metrics.csv, top_packages.csv, genre_breakdown.csv,
// auth_histogram.csv, cipher_distribution.csv.
void emit_report(const CorpusStats& stats, const std::filesystem::path& out_dir);

CorpusStats parse_report_json(const std::filesystem::path& file);

}  // namespace keyscan

#endif
