#ifndef KEYSCAN_JSONIO_HPP
#define KEYSCAN_JSONIO_HPP

#include "json.hpp"
#include "keyscan/callgraph.hpp"
#include "keyscan/corpus.hpp"
#include "keyscan/sigdb.hpp"
#include "keyscan/smali_ir.hpp"
#include "keyscan/values.hpp"

// JSON converters for the persisted record types (nlohmann ADL hooks).
// nlohmann::json keeps object keys sorted, which the result-file contract
// relies on.

namespace keyscan {

void to_json(nlohmann::json& j, const MethodSignature& s);
void from_json(const nlohmann::json& j, MethodSignature& s);

void to_json(nlohmann::json& j, const ResolvedValue& v);
void from_json(const nlohmann::json& j, ResolvedValue& v);

void to_json(nlohmann::json& j, const PrefilterHit& h);
void from_json(const nlohmann::json& j, PrefilterHit& h);

void to_json(nlohmann::json& j, const PrefilterResult& r);
void from_json(const nlohmann::json& j, PrefilterResult& r);

void to_json(nlohmann::json& j, const ApiCallSite& s);
void from_json(const nlohmann::json& j, ApiCallSite& s);

void to_json(nlohmann::json& j, const ReachabilityResult& r);
void from_json(const nlohmann::json& j, ReachabilityResult& r);

void to_json(nlohmann::json& j, const AppResult& r);
void from_json(const nlohmann::json& j, AppResult& r);

void to_json(nlohmann::json& j, const ApkRecord& r);
void from_json(const nlohmann::json& j, ApkRecord& r);

void to_json(nlohmann::json& j, const PackageEntry& e);
void from_json(const nlohmann::json& j, PackageEntry& e);

void to_json(nlohmann::json& j, const ConfigSnapshot& c);
void from_json(const nlohmann::json& j, ConfigSnapshot& c);

void to_json(nlohmann::json& j, const CorpusManifest& m);
void from_json(const nlohmann::json& j, CorpusManifest& m);

}  // namespace keyscan

#endif
