#include "keyscan/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "keyscan/jsonio.hpp"
#include "keyscan/util.hpp"

namespace keyscan {

using nlohmann::json;

std::string to_string(LintSeverity s) {
    switch (s) {
        case LintSeverity::Info: return "info";
        case LintSeverity::Warn: return "warn";
        case LintSeverity::High: return "high";
    }
    return "info";
}

int auth_bucket_of(std::int64_t seconds) {
    if (seconds <= 0) return 0;       // authenticate per use
    if (seconds <= 3) return 1;       // <=3s
    if (seconds == 5) return 2;       // 5s
    if (seconds == 3600) return 3;    // 1h
    return 4;                         // other
}

namespace {

const char* kInitId = "kgps.init";

bool is_setter_id(const std::string& api_id) {
    return starts_with(api_id, "kgps.") && api_id != kInitId;
}

// Setter args we expect to resolve statically (dates and byte arrays never
// do, so they stay out of the unresolved-arg bucket).
bool counts_toward_resolution(const std::string& api_id) {
    static const std::set<std::string> kNonResolvable = {
        "kgps.setCertificateNotAfter", "kgps.setCertificateNotBefore",
        "kgps.setKeyValidityForOriginationEnd", "kgps.setKeyValidityEnd",
        "kgps.setKeyValidityStart", "kgps.setKeyValidityForConsumptionEnd",
        "kgps.setAttestationChallenge", "kgps.setAlgorithmParameterSpec"};
    return kNonResolvable.count(api_id) == 0;
}

bool site_args_resolved(const ApiCallSite& site) {
    if (!counts_toward_resolution(site.callee)) return true;
    if (site.resolved_args.empty()) return true;
    for (const auto& a : site.resolved_args)
        if (!a.value.is_resolved()) return false;
    return true;
}

std::optional<bool> bool_arg(const ApiCallSite& site, int index) {
    const ResolvedValue* v = site.arg(index);
    if (!v) return std::nullopt;
    if (const auto* b = std::get_if<ResolvedValue::Bool>(&v->kind)) return b->value;
    return std::nullopt;
}

std::optional<std::int64_t> int_arg(const ApiCallSite& site, int index) {
    const ResolvedValue* v = site.arg(index);
    if (!v) return std::nullopt;
    if (const auto* i = std::get_if<ResolvedValue::Int>(&v->kind)) return i->value;
    return std::nullopt;
}

std::optional<std::string> str_arg(const ApiCallSite& site, int index) {
    const ResolvedValue* v = site.arg(index);
    if (!v) return std::nullopt;
    if (const auto* s = std::get_if<ResolvedValue::Str>(&v->kind)) return s->value;
    return std::nullopt;
}

std::optional<std::vector<std::string>> str_array_arg(const ApiCallSite& site, int index) {
    const ResolvedValue* v = site.arg(index);
    if (!v) return std::nullopt;
    if (const auto* a = std::get_if<ResolvedValue::StrArray>(&v->kind)) return a->values;
    return std::nullopt;
}

bool is_hardware_provider(const std::string& provider) {
    return provider == "AndroidKeyStore" || provider == "AndroidKeyStoreBCWorkaround";
}

// Algorithm requested by a hardware-attributed Java factory call, when the
// provider-string argument names the Android Keystore.
std::optional<std::string> hardware_cipher_of(const ApiCallSite& site) {
    if (site.callee == "kgen.getInstance" || site.callee == "kpgen.getInstance") {
        auto provider = str_arg(site, 1);
        if (!provider || !is_hardware_provider(*provider)) return std::nullopt;
        auto algorithm = str_arg(site, 0);
        if (!algorithm) return std::nullopt;
        auto slash = algorithm->find('/');
        return slash == std::string::npos ? *algorithm : algorithm->substr(0, slash);
    }
    return std::nullopt;
}

void apply_setter(KeyConfig& config, const ApiCallSite& site) {
    const std::string& id = site.callee;
    if (id == "kgps.setKeySize") {
        if (auto v = int_arg(site, 0)) config.key_size = *v;
    } else if (id == "kgps.setBlockModes") {
        if (auto v = str_array_arg(site, 0)) config.block_modes = *v;
    } else if (id == "kgps.setEncryptionPaddings") {
        if (auto v = str_array_arg(site, 0)) config.encryption_paddings = *v;
    } else if (id == "kgps.setSignaturePaddings") {
        if (auto v = str_array_arg(site, 0)) config.signature_paddings = *v;
    } else if (id == "kgps.setDigests") {
        if (auto v = str_array_arg(site, 0)) config.digests = *v;
    } else if (id == "kgps.setIsStrongBoxBacked") {
        if (auto v = bool_arg(site, 0)) config.strongbox = *v;
    } else if (id == "kgps.setUserAuthenticationRequired") {
        if (auto v = bool_arg(site, 0)) config.auth_required = *v;
    } else if (id == "kgps.setUserAuthenticationValidityDurationSeconds") {
        if (auto v = int_arg(site, 0)) config.auth_validity_seconds = *v;
    } else if (id == "kgps.setUserAuthenticationParameters") {
        if (auto v = int_arg(site, 0); v && !config.auth_validity_seconds)
            config.auth_validity_seconds = *v;
    } else if (id == "kgps.setRandomizedEncryptionRequired") {
        if (auto v = bool_arg(site, 0)) config.randomized_encryption = *v;
    } else if (id == "kgps.setAttestationChallenge") {
        config.attestation = true;
    } else if (id == "kgps.setUserConfirmationRequired") {
        if (auto v = bool_arg(site, 0)) config.user_confirmation = *v;
    }
}

}  // namespace

AssemblyResult assemble_key_configs(const AppResult& result) {
    AssemblyResult out;
    std::map<std::string, bool> reachable_of;
    for (const auto& r : result.reachability) reachable_of[r.callsite_id] = r.reachable;
    auto included = [&](const ApiCallSite& site) {
        auto it = reachable_of.find(site.callsite_id);
        return it == reachable_of.end() || it->second;
    };

    std::map<MethodSignature, std::vector<const ApiCallSite*>> by_method;
    for (const auto& site : result.call_sites) {
        if (!included(site)) {
            ++out.unreachable_sites;
            continue;
        }
        by_method[site.caller].push_back(&site);
    }

    for (const auto& [method, sites] : by_method) {
        std::vector<const ApiCallSite*> inits;
        std::vector<const ApiCallSite*> setters;
        std::vector<const ApiCallSite*> factories;
        for (const auto* site : sites) {
            if (site->callee == kInitId) inits.push_back(site);
            else if (is_setter_id(site->callee)) setters.push_back(site);
            else if (hardware_cipher_of(*site)) factories.push_back(site);
        }
        if (inits.empty() && setters.empty()) continue;

        std::map<std::string, int> inits_per_group;
        for (const auto* init : inits)
            if (!init->receiver_group.empty()) ++inits_per_group[init->receiver_group];

        std::vector<KeyConfig> configs;
        std::vector<std::vector<const ApiCallSite*>> members;
        std::map<std::string, size_t> config_of_group;
        for (const auto* init : inits) {
            KeyConfig config;
            config.app_id = result.app_id;
            config.method = method;
            config.has_init = true;
            config.alias = str_arg(*init, 0);
            if (auto purposes = int_arg(*init, 1)) config.purposes = decode_purposes(*purposes);
            if (!init->receiver_group.empty() && inits_per_group[init->receiver_group] == 1)
                config_of_group[init->receiver_group] = configs.size();
            configs.push_back(std::move(config));
            members.push_back({init});
        }

        KeyConfig partial;
        partial.app_id = result.app_id;
        partial.method = method;
        std::vector<const ApiCallSite*> partial_members;

        for (const auto* setter : setters) {
            if (!site_args_resolved(*setter)) ++out.unresolved_arg_sites;
            auto it = setter->receiver_group.empty()
                          ? config_of_group.end()
                          : config_of_group.find(setter->receiver_group);
            if (it != config_of_group.end()) {
                apply_setter(configs[it->second], *setter);
                members[it->second].push_back(setter);
            } else {
                apply_setter(partial, *setter);
                partial_members.push_back(setter);
            }
        }

        // a cipher request links only when both sides are unambiguous in the
        // method: one init-anchored config, one hardware factory call
        if (configs.size() == 1 && factories.size() == 1)
            configs[0].cipher = hardware_cipher_of(*factories[0]);

        for (size_t i = 0; i < configs.size(); ++i) {
            int resolved = 0;
            for (const auto* site : members[i])
                if (site_args_resolved(*site)) ++resolved;
            configs[i].completeness =
                members[i].empty() ? 0.0 : static_cast<double>(resolved) / members[i].size();
            for (const auto* site : members[i]) configs[i].callsite_ids.push_back(site->callsite_id);
            std::sort(configs[i].callsite_ids.begin(), configs[i].callsite_ids.end());
            out.configs.push_back(std::move(configs[i]));
        }
        if (!partial_members.empty()) {
            int resolved = 0;
            for (const auto* site : partial_members)
                if (site_args_resolved(*site)) ++resolved;
            // the missing init counts as an unresolved slot, so partials stay
            // below 1
            partial.completeness =
                static_cast<double>(resolved) / (static_cast<double>(partial_members.size()) + 1);
            for (const auto* site : partial_members)
                partial.callsite_ids.push_back(site->callsite_id);
            std::sort(partial.callsite_ids.begin(), partial.callsite_ids.end());
            out.configs.push_back(std::move(partial));
        }
    }
    return out;
}

CorpusStats compute_stats(const CorpusManifest& manifest, const std::vector<AppResult>& results,
                          const std::vector<DataSafetyLabel>* labels,
                          const StatsOptions& options) {
    if (results.empty()) throw EmptyCorpus();
    SignatureDb db = SignatureDb::builtin_default();
    auto category_of = [&](const std::string& api_id) {
        const ApiSignature* api = db.find_by_id(api_id);
        return api ? api->category : ApiCategory::Other;
    };

    CorpusStats stats;
    stats.total_apps = static_cast<std::int64_t>(results.size());

    std::int64_t matched_apps = 0;
    std::int64_t keystore_site_apps = 0;
    std::int64_t strongbox_site_apps = 0;
    std::int64_t apps_strongbox_true = 0;
    std::int64_t apps_strongbox_only_unresolved = 0;
    std::int64_t sb_true = 0, sb_false = 0;
    std::int64_t init_sites = 0, init_first = 0, init_third = 0, init_excluded = 0;
    std::int64_t re_false = 0;
    std::int64_t attestation_sites = 0;
    std::int64_t auth_true = 0, auth_resolved = 0;
    std::map<std::string, std::int64_t> purpose_counts;
    std::int64_t purposes_resolved = 0;
    std::map<std::string, std::int64_t> third_party_inits;
    std::map<std::string, std::int64_t> ciphers;
    struct GenreAcc {
        std::int64_t apps = 0, keystore = 0, strongbox = 0;
    };
    std::map<std::string, GenreAcc> genres;

    for (const auto& result : results) {
        bool has_keystore_site = false, has_strongbox_site = false;
        bool sb_resolved_true = false, sb_any = false, sb_any_resolved = false;
        for (const auto& site : result.call_sites) {
            ApiCategory category = category_of(site.callee);
            if (is_keystore_category(category)) has_keystore_site = true;
            if (category == ApiCategory::StrongBox) {
                has_strongbox_site = true;
                sb_any = true;
                if (auto v = bool_arg(site, 0)) {
                    sb_any_resolved = true;
                    if (*v) {
                        ++sb_true;
                        sb_resolved_true = true;
                    } else {
                        ++sb_false;
                    }
                }
            }
            if (category == ApiCategory::RandomizedEncryption) {
                if (auto v = bool_arg(site, 0); v && !*v) ++re_false;
            }
            if (category == ApiCategory::Attestation) ++attestation_sites;
            if (site.callee == "kgps.setUserAuthenticationRequired") {
                if (auto v = bool_arg(site, 0)) {
                    ++auth_resolved;
                    if (*v) ++auth_true;
                }
            }
            if (site.callee == "kgps.setUserAuthenticationValidityDurationSeconds" ||
                site.callee == "kgps.setUserAuthenticationParameters") {
                if (auto v = int_arg(site, 0)) ++stats.auth_validity_hist[auth_bucket_of(*v)];
            }
            if (auto cipher = hardware_cipher_of(site)) ++ciphers[*cipher];
            if (site.callee == kInitId) {
                ++init_sites;
                if (auto purposes = int_arg(site, 1)) {
                    ++purposes_resolved;
                    ++purpose_counts[decode_purposes(*purposes).to_string()];
                }
                auto entry = manifest.package_index.find(site.caller_package);
                if (entry != manifest.package_index.end()) {
                    switch (entry->second.party) {
                        case Party::First: ++init_first; break;
                        case Party::Third:
                            ++init_third;
                            ++third_party_inits[site.caller_package];
                            break;
                        case Party::ExcludedObfuscated: ++init_excluded; break;
                        case Party::Withheld: break;
                    }
                }
            }
        }
        for (const auto& reach : result.reachability) {
            if (reach.reachable) ++stats.sites_reachable;
            else ++stats.sites_unreachable;
            if (reach.truncated) ++stats.sites_truncated;
        }
        if (result.prefilter.matched) ++matched_apps;
        if (has_keystore_site) ++keystore_site_apps;
        if (has_strongbox_site) ++strongbox_site_apps;
        if (sb_resolved_true) ++apps_strongbox_true;
        if (sb_any && !sb_any_resolved) ++apps_strongbox_only_unresolved;
        GenreAcc& acc = genres[result.genre];
        ++acc.apps;
        if (result.prefilter.matched) ++acc.keystore;
        if (has_strongbox_site) ++acc.strongbox;
    }

    stats.apps_with_keystore_ref = {matched_apps, stats.total_apps};
    if (labels) {
        std::map<std::string, SensitivityClass> sensitivity;
        for (const auto& label : *labels) sensitivity[label.app_id] = classify_sensitivity(label);
        std::int64_t sensitive = 0, sensitive_matched = 0;
        for (const auto& result : results) {
            auto it = sensitivity.find(result.app_id);
            if (it == sensitivity.end() || it->second != SensitivityClass::Sensitive) continue;
            ++sensitive;
            if (result.prefilter.matched) ++sensitive_matched;
        }
        stats.sensitive_apps_with_keystore_ref = Fraction{sensitive_matched, sensitive};
    }
    stats.strongbox_ref_apps = {strongbox_site_apps, keystore_site_apps};
    stats.strongbox_arg_true = {sb_true, sb_true + sb_false};
    stats.strongbox_arg_false = {sb_false, sb_true + sb_false};
    stats.apps_strongbox_requested = {apps_strongbox_true, keystore_site_apps};
    stats.apps_strongbox_only_unresolved = {apps_strongbox_only_unresolved, keystore_site_apps};
    stats.init_first_party = {init_first, init_first + init_third};
    stats.init_third_party = {init_third, init_first + init_third};
    stats.init_excluded_obfuscated = {init_excluded, init_sites};
    stats.auth_required_true = {auth_true, auth_resolved};
    stats.randomized_encryption_disabled = {re_false, init_sites};
    stats.attestation_fraction = {attestation_sites, init_sites};
    for (const auto& [name, count] : purpose_counts)
        stats.purpose_distribution[name] = {count, purposes_resolved};
    stats.cipher_distribution = ciphers;

    std::vector<std::pair<std::string, std::int64_t>> top(third_party_inits.begin(),
                                                          third_party_inits.end());
    std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (static_cast<int>(top.size()) > options.top_n) top.resize(options.top_n);
    stats.top_third_party_packages = std::move(top);

    for (const auto& [genre, acc] : genres) {
        GenreRow row;
        row.genre = genre;
        row.apps = acc.apps;
        row.keystore = {acc.keystore, acc.apps};
        row.strongbox = {acc.strongbox, acc.apps};
        stats.genre_breakdown.push_back(std::move(row));
    }
    return stats;
}

const std::vector<std::string> kLintRuleIds = {"R1", "R2", "R3", "R4", "R5", "R6"};

namespace {

std::string key_ref_of(const KeyConfig& key) {
    std::string ref = key.method.to_string();
    if (key.alias) ref += " alias=" + *key.alias;
    return ref;
}

std::string normalize_cipher(const std::string& cipher) {
    std::string up;
    for (char c : cipher) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "DESEDE") return "3DES";
    if (up == "HMACSHA1") return "HMAC-SHA1";
    return up;
}

// Purposes compatible with each key algorithm; unlisted algorithms are not
// checked.
const std::map<std::string, std::set<std::string>>& purpose_table() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"EC", {"SIGN", "VERIFY", "AGREE_KEY", "ATTEST_KEY"}},
        {"ECDSA", {"SIGN", "VERIFY", "AGREE_KEY", "ATTEST_KEY"}},
        {"AES", {"ENCRYPT", "DECRYPT", "WRAP_KEY", "ATTEST_KEY"}},
        {"3DES", {"ENCRYPT", "DECRYPT", "WRAP_KEY", "ATTEST_KEY"}},
        {"CHACHA20", {"ENCRYPT", "DECRYPT", "WRAP_KEY", "ATTEST_KEY"}},
        {"HMAC-SHA1", {"SIGN", "VERIFY", "ATTEST_KEY"}},
        {"HMAC-SHA256", {"SIGN", "VERIFY", "ATTEST_KEY"}},
        {"HMAC-SHA512", {"SIGN", "VERIFY", "ATTEST_KEY"}},
    };
    return table;
}

}  // namespace

std::vector<LintFinding> lint_single_rule(const KeyConfig& key, const std::string& rule_id) {
    std::vector<LintFinding> findings;
    auto emit = [&](LintSeverity severity, const std::string& message) {
        findings.push_back({key.app_id, key_ref_of(key), rule_id, severity, message});
    };
    if (rule_id == "R1") {
        if (key.randomized_encryption && !*key.randomized_encryption)
            emit(LintSeverity::High, "randomized encryption (IND-CPA) explicitly disabled");
    } else if (rule_id == "R2") {
        if (key.strongbox && !*key.strongbox)
            emit(LintSeverity::Info, "explicitly opts out of StrongBox");
    } else if (rule_id == "R3") {
        if (key.cipher) {
            std::string c = normalize_cipher(*key.cipher);
            if (c == "3DES" || c == "HMAC-SHA1")
                emit(LintSeverity::High, "legacy cipher " + c + " requested");
        }
    } else if (rule_id == "R4") {
        if (key.auth_validity_seconds && *key.auth_validity_seconds > 0 &&
            *key.auth_validity_seconds <= 3)
            emit(LintSeverity::Info,
                 "auth validity of " + std::to_string(*key.auth_validity_seconds) +
                     " s is effectively per-use");
    } else if (rule_id == "R5") {
        if (key.user_confirmation && !*key.user_confirmation)
            emit(LintSeverity::Info, "user confirmation explicitly disabled");
    } else if (rule_id == "R6") {
        if (key.cipher && key.purposes) {
            auto it = purpose_table().find(normalize_cipher(*key.cipher));
            if (it != purpose_table().end()) {
                for (const auto& p : key.purposes->names) {
                    if (starts_with(p, "UNKNOWN(")) continue;
                    if (!it->second.count(p)) {
                        emit(LintSeverity::Warn, "purpose " + p + " incompatible with cipher " +
                                                     normalize_cipher(*key.cipher));
                        break;
                    }
                }
            }
        }
    }
    return findings;
}

std::vector<LintFinding> lint_config(const KeyConfig& key) {
    std::vector<LintFinding> findings;
    for (const auto& rule : kLintRuleIds) {
        auto partial = lint_single_rule(key, rule);
        findings.insert(findings.end(), partial.begin(), partial.end());
    }
    return findings;
}

namespace {

void to_json(json& j, const Fraction& f) {
    j = json{{"num", f.num},
             {"den", f.den},
             {"percent", std::round(f.percent() * 100.0) / 100.0}};
}

Fraction fraction_from_json(const json& j) {
    return Fraction{j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>()};
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

void emit_report(const CorpusStats& stats, const std::filesystem::path& out_dir) {
    json j;
    j["total_apps"] = stats.total_apps;
    to_json(j["apps_with_keystore_ref"], stats.apps_with_keystore_ref);
    if (stats.sensitive_apps_with_keystore_ref)
        to_json(j["sensitive_apps_with_keystore_ref"], *stats.sensitive_apps_with_keystore_ref);
    to_json(j["strongbox_ref_apps"], stats.strongbox_ref_apps);
    to_json(j["strongbox_arg_true"], stats.strongbox_arg_true);
    to_json(j["strongbox_arg_false"], stats.strongbox_arg_false);
    to_json(j["apps_strongbox_requested"], stats.apps_strongbox_requested);
    to_json(j["apps_strongbox_only_unresolved"], stats.apps_strongbox_only_unresolved);
    to_json(j["init_first_party"], stats.init_first_party);
    to_json(j["init_third_party"], stats.init_third_party);
    to_json(j["init_excluded_obfuscated"], stats.init_excluded_obfuscated);
    j["top_third_party_packages"] = json::array();
    for (const auto& [name, count] : stats.top_third_party_packages)
        j["top_third_party_packages"].push_back(json{{"package", name}, {"init_calls", count}});
    j["purpose_distribution"] = json::object();
    for (const auto& [name, f] : stats.purpose_distribution)
        to_json(j["purpose_distribution"][name.empty() ? "(none)" : name], f);
    to_json(j["auth_required_true"], stats.auth_required_true);
    j["auth_validity_histogram"] = json::object();
    for (size_t i = 0; i < stats.auth_validity_hist.size(); ++i)
        j["auth_validity_histogram"][kAuthBuckets[i]] = stats.auth_validity_hist[i];
    to_json(j["randomized_encryption_disabled"], stats.randomized_encryption_disabled);
    to_json(j["attestation_fraction"], stats.attestation_fraction);
    j["cipher_distribution"] = stats.cipher_distribution;
    j["genre_breakdown"] = json::array();
    for (const auto& row : stats.genre_breakdown) {
        json g{{"genre", row.genre}, {"apps", row.apps}};
        to_json(g["keystore"], row.keystore);
        to_json(g["strongbox"], row.strongbox);
        j["genre_breakdown"].push_back(g);
    }
    j["reachability"] = json{{"reachable", stats.sites_reachable},
                             {"unreachable", stats.sites_unreachable},
                             {"truncated", stats.sites_truncated}};
    j["metadata"] = json{{"std_estimator", "sample (n-1)"},
                         {"percent_decimals", 2}};

    try {
        write_file_atomic(out_dir / "report.json", j.dump(2) + "\n");

        std::ostringstream metrics;
        metrics << "metric,numerator,denominator,percent\n";
        auto row = [&](const std::string& name, const Fraction& f) {
            metrics << name << "," << f.num << "," << f.den << ","
                    << format_fixed(f.percent(), 2) << "\n";
        };
        row("a.apps_with_keystore_ref", stats.apps_with_keystore_ref);
        if (stats.sensitive_apps_with_keystore_ref)
            row("b.sensitive_apps_with_keystore_ref", *stats.sensitive_apps_with_keystore_ref);
        row("c.strongbox_ref_apps", stats.strongbox_ref_apps);
        row("d.strongbox_arg_true", stats.strongbox_arg_true);
        row("d.strongbox_arg_false", stats.strongbox_arg_false);
        row("e.apps_strongbox_requested", stats.apps_strongbox_requested);
        row("e.apps_strongbox_only_unresolved", stats.apps_strongbox_only_unresolved);
        row("f.init_first_party", stats.init_first_party);
        row("f.init_third_party", stats.init_third_party);
        row("f.init_excluded_obfuscated", stats.init_excluded_obfuscated);
        for (const auto& [name, f] : stats.purpose_distribution)
            row("h.purposes." + (name.empty() ? "(none)" : name), f);
        row("i.auth_required_true", stats.auth_required_true);
        row("j.randomized_encryption_disabled", stats.randomized_encryption_disabled);
        row("k.attestation_fraction", stats.attestation_fraction);
        write_file_atomic(out_dir / "metrics.csv", metrics.str());

        std::ostringstream top;
        top << "package,init_calls\n";
        for (const auto& [name, count] : stats.top_third_party_packages)
            top << csv_escape(name) << "," << count << "\n";
        write_file_atomic(out_dir / "top_packages.csv", top.str());

        std::ostringstream genre;
        genre << "genre,apps,keystore_apps,keystore_pct,strongbox_apps,strongbox_pct\n";
        for (const auto& g : stats.genre_breakdown)
            genre << csv_escape(g.genre) << "," << g.apps << "," << g.keystore.num << ","
                  << format_fixed(g.keystore.percent(), 2) << "," << g.strongbox.num << ","
                  << format_fixed(g.strongbox.percent(), 2) << "\n";
        write_file_atomic(out_dir / "genre_breakdown.csv", genre.str());

        std::ostringstream hist;
        hist << "bucket,count\n";
        for (size_t i = 0; i < stats.auth_validity_hist.size(); ++i)
            hist << kAuthBuckets[i] << "," << stats.auth_validity_hist[i] << "\n";
        write_file_atomic(out_dir / "auth_histogram.csv", hist.str());

        std::vector<std::pair<std::string, std::int64_t>> ciphers(
            stats.cipher_distribution.begin(), stats.cipher_distribution.end());
        std::sort(ciphers.begin(), ciphers.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        std::ostringstream cdist;
        cdist << "cipher,count\n";
        for (const auto& [name, count] : ciphers) cdist << csv_escape(name) << "," << count << "\n";
        write_file_atomic(out_dir / "cipher_distribution.csv", cdist.str());
    } catch (const std::exception& e) {
        throw UnwritableOutput(e.what());
    }
}

CorpusStats parse_report_json(const std::filesystem::path& file) {
    json j = json::parse(read_file(file));
    CorpusStats stats;
    stats.total_apps = j.at("total_apps").get<std::int64_t>();
    stats.apps_with_keystore_ref = fraction_from_json(j.at("apps_with_keystore_ref"));
    if (j.contains("sensitive_apps_with_keystore_ref"))
        stats.sensitive_apps_with_keystore_ref =
            fraction_from_json(j.at("sensitive_apps_with_keystore_ref"));
    stats.strongbox_ref_apps = fraction_from_json(j.at("strongbox_ref_apps"));
    stats.strongbox_arg_true = fraction_from_json(j.at("strongbox_arg_true"));
    stats.strongbox_arg_false = fraction_from_json(j.at("strongbox_arg_false"));
    stats.apps_strongbox_requested = fraction_from_json(j.at("apps_strongbox_requested"));
    stats.apps_strongbox_only_unresolved =
        fraction_from_json(j.at("apps_strongbox_only_unresolved"));
    stats.init_first_party = fraction_from_json(j.at("init_first_party"));
    stats.init_third_party = fraction_from_json(j.at("init_third_party"));
    stats.init_excluded_obfuscated = fraction_from_json(j.at("init_excluded_obfuscated"));
    for (const auto& e : j.at("top_third_party_packages"))
        stats.top_third_party_packages.emplace_back(e.at("package").get<std::string>(),
                                                    e.at("init_calls").get<std::int64_t>());
    for (const auto& [name, f] : j.at("purpose_distribution").items())
        stats.purpose_distribution[name == "(none)" ? "" : name] = fraction_from_json(f);
    stats.auth_required_true = fraction_from_json(j.at("auth_required_true"));
    for (size_t i = 0; i < stats.auth_validity_hist.size(); ++i)
        stats.auth_validity_hist[i] =
            j.at("auth_validity_histogram").at(kAuthBuckets[i]).get<std::int64_t>();
    stats.randomized_encryption_disabled =
        fraction_from_json(j.at("randomized_encryption_disabled"));
    stats.attestation_fraction = fraction_from_json(j.at("attestation_fraction"));
    for (const auto& [name, count] : j.at("cipher_distribution").items())
        stats.cipher_distribution[name] = count.get<std::int64_t>();
    for (const auto& g : j.at("genre_breakdown")) {
        GenreRow row;
        row.genre = g.at("genre").get<std::string>();
        row.apps = g.at("apps").get<std::int64_t>();
        row.keystore = fraction_from_json(g.at("keystore"));
        row.strongbox = fraction_from_json(g.at("strongbox"));
        stats.genre_breakdown.push_back(std::move(row));
    }
    stats.sites_reachable = j.at("reachability").at("reachable").get<std::int64_t>();
    stats.sites_unreachable = j.at("reachability").at("unreachable").get<std::int64_t>();
    stats.sites_truncated = j.at("reachability").at("truncated").get<std::int64_t>();
    return stats;
}

}  // namespace keyscan
