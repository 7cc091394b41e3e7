#include "keyscan/sigdb.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "keyscan/util.hpp"

namespace keyscan {

using nlohmann::json;

std::string to_string(ValueDomain d) {
    switch (d) {
        case ValueDomain::Boolean: return "boolean";
        case ValueDomain::Int: return "int";
        case ValueDomain::String: return "string";
        case ValueDomain::StringArray: return "string-array";
        case ValueDomain::Date: return "date";
        case ValueDomain::ByteArray: return "byte-array";
        case ValueDomain::None: return "none";
    }
    return "none";
}

std::string to_string(ApiCategory c) {
    switch (c) {
        case ApiCategory::KeystoreInit: return "keystore-init";
        case ApiCategory::KeystoreParam: return "keystore-param";
        case ApiCategory::StrongBox: return "strongbox";
        case ApiCategory::Auth: return "auth";
        case ApiCategory::RandomizedEncryption: return "randomized-encryption";
        case ApiCategory::Attestation: return "attestation";
        case ApiCategory::JavaProvider: return "java-provider";
        case ApiCategory::Other: return "other";
    }
    return "other";
}

ValueDomain value_domain_from_string(const std::string& s) {
    if (s == "boolean") return ValueDomain::Boolean;
    if (s == "int") return ValueDomain::Int;
    if (s == "string") return ValueDomain::String;
    if (s == "string-array") return ValueDomain::StringArray;
    if (s == "date") return ValueDomain::Date;
    if (s == "byte-array") return ValueDomain::ByteArray;
    if (s == "none") return ValueDomain::None;
    throw BadDescriptor("unknown value_domain: " + s);
}

ApiCategory api_category_from_string(const std::string& s) {
    if (s == "keystore-init") return ApiCategory::KeystoreInit;
    if (s == "keystore-param") return ApiCategory::KeystoreParam;
    if (s == "strongbox") return ApiCategory::StrongBox;
    if (s == "auth") return ApiCategory::Auth;
    if (s == "randomized-encryption") return ApiCategory::RandomizedEncryption;
    if (s == "attestation") return ApiCategory::Attestation;
    if (s == "java-provider") return ApiCategory::JavaProvider;
    if (s == "other") return ApiCategory::Other;
    throw BadDescriptor("unknown category: " + s);
}

bool is_keystore_category(ApiCategory c) {
    switch (c) {
        case ApiCategory::KeystoreInit:
        case ApiCategory::KeystoreParam:
        case ApiCategory::StrongBox:
        case ApiCategory::Auth:
        case ApiCategory::RandomizedEncryption:
        case ApiCategory::Attestation: return true;
        default: return false;
    }
}

std::string to_string(UnresolvedReason r) {
    switch (r) {
        case UnresolvedReason::MultipleDefs: return "multiple-defs";
        case UnresolvedReason::NonConstantDef: return "non-constant-def";
        case UnresolvedReason::CrossMethod: return "cross-method";
        case UnresolvedReason::UnsupportedOp: return "unsupported-op";
        case UnresolvedReason::RegisterUndefined: return "register-undefined";
    }
    return "non-constant-def";
}

UnresolvedReason unresolved_reason_from_string(const std::string& s) {
    if (s == "multiple-defs") return UnresolvedReason::MultipleDefs;
    if (s == "non-constant-def") return UnresolvedReason::NonConstantDef;
    if (s == "cross-method") return UnresolvedReason::CrossMethod;
    if (s == "unsupported-op") return UnresolvedReason::UnsupportedOp;
    if (s == "register-undefined") return UnresolvedReason::RegisterUndefined;
    throw std::invalid_argument("unknown unresolved reason: " + s);
}

void SignatureDb::add(ApiSignature sig) {
    if (by_id_.count(sig.api_id)) throw DuplicateApiId(sig.api_id);
    for (const auto& p : sig.signature.param_descriptors) {
        try {
            auto parsed = parse_param_descriptors(p);
            if (parsed.size() != 1) throw std::invalid_argument("not a single descriptor");
        } catch (const std::invalid_argument& e) {
            throw BadDescriptor("api " + sig.api_id + ": bad param descriptor '" + p +
                                "': " + e.what());
        }
    }
    if (sig.value_domain != ValueDomain::None) {
        if (!sig.arg_of_interest)
            throw BadDescriptor("api " + sig.api_id + ": value_domain without arg_of_interest");
        if (*sig.arg_of_interest < 0 ||
            *sig.arg_of_interest >= static_cast<int>(sig.signature.param_descriptors.size()))
            throw BadDescriptor("api " + sig.api_id + ": arg_of_interest out of range");
    }
    by_id_[sig.api_id] = entries_.size();
    by_signature_[sig.signature] = entries_.size();
    entries_.push_back(std::move(sig));
}

const ApiSignature* SignatureDb::find_by_id(const std::string& api_id) const {
    auto it = by_id_.find(api_id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const ApiSignature* SignatureDb::match(const MethodSignature& sig) const {
    auto it = by_signature_.find(sig);
    return it == by_signature_.end() ? nullptr : &entries_[it->second];
}

SignatureDb SignatureDb::from_json_text(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.is_array()) throw BadDescriptor("signature db must be a JSON array");
    SignatureDb db;
    for (const auto& e : doc) {
        ApiSignature sig;
        sig.api_id = e.at("api_id").get<std::string>();
        sig.signature.class_name = e.at("class").get<std::string>();
        sig.signature.method_name = e.at("name").get<std::string>();
        sig.signature.param_descriptors = e.at("params").get<std::vector<std::string>>();
        sig.signature.return_descriptor = e.at("return").get<std::string>();
        if (e.contains("arg_of_interest")) sig.arg_of_interest = e["arg_of_interest"].get<int>();
        sig.value_domain = value_domain_from_string(e.at("value_domain").get<std::string>());
        sig.category = api_category_from_string(e.at("category").get<std::string>());
        db.add(std::move(sig));
    }
    return db;
}

SignatureDb SignatureDb::from_file(const std::filesystem::path& path) {
    return from_json_text(read_file(path));
}

std::string SignatureDb::to_json_text() const {
    json arr = json::array();
    for (const auto& e : entries_) {
        json o;
        o["api_id"] = e.api_id;
        o["class"] = e.signature.class_name;
        o["name"] = e.signature.method_name;
        o["params"] = e.signature.param_descriptors;
        o["return"] = e.signature.return_descriptor;
        if (e.arg_of_interest) o["arg_of_interest"] = *e.arg_of_interest;
        o["value_domain"] = to_string(e.value_domain);
        o["category"] = to_string(e.category);
        arr.push_back(o);
    }
    return arr.dump(2) + "\n";
}

namespace {

constexpr const char* kBuilder = "android.security.keystore.KeyGenParameterSpec$Builder";
constexpr const char* kBuilderRet = "Landroid/security/keystore/KeyGenParameterSpec$Builder;";
constexpr const char* kString = "Ljava/lang/String;";
constexpr const char* kStringArray = "[Ljava/lang/String;";
constexpr const char* kDate = "Ljava/util/Date;";

ApiSignature builder_entry(const std::string& api_id, const std::string& name,
                           std::vector<std::string> params, const std::string& ret,
                           std::optional<int> arg, ValueDomain domain, ApiCategory cat) {
    ApiSignature s;
    s.api_id = api_id;
    s.signature = {kBuilder, name, std::move(params), ret};
    s.arg_of_interest = arg;
    s.value_domain = domain;
    s.category = cat;
    return s;
}

ApiSignature entry(const std::string& api_id, const std::string& cls, const std::string& name,
                   std::vector<std::string> params, const std::string& ret, std::optional<int> arg,
                   ValueDomain domain, ApiCategory cat) {
    ApiSignature s;
    s.api_id = api_id;
    s.signature = {cls, name, std::move(params), ret};
    s.arg_of_interest = arg;
    s.value_domain = domain;
    s.category = cat;
    return s;
}

}  // namespace

SignatureDb SignatureDb::builtin_default() {
    using VD = ValueDomain;
    using AC = ApiCategory;
    SignatureDb db;
    db.add(builder_entry("kgps.init", "<init>", {kString, "I"}, "V", 1, VD::Int,
                         AC::KeystoreInit));
    db.add(builder_entry("kgps.setEncryptionPaddings", "setEncryptionPaddings", {kStringArray},
                         kBuilderRet, 0, VD::StringArray, AC::KeystoreParam));
    db.add(builder_entry("kgps.setBlockModes", "setBlockModes", {kStringArray}, kBuilderRet, 0,
                         VD::StringArray, AC::KeystoreParam));
    db.add(builder_entry("kgps.setKeySize", "setKeySize", {"I"}, kBuilderRet, 0, VD::Int,
                         AC::KeystoreParam));
    db.add(builder_entry("kgps.setUserAuthenticationRequired", "setUserAuthenticationRequired",
                         {"Z"}, kBuilderRet, 0, VD::Boolean, AC::Auth));
    db.add(builder_entry("kgps.setDigests", "setDigests", {kStringArray}, kBuilderRet, 0,
                         VD::StringArray, AC::KeystoreParam));
    db.add(builder_entry("kgps.setCertificateNotAfter", "setCertificateNotAfter", {kDate},
                         kBuilderRet, 0, VD::Date, AC::KeystoreParam));
    db.add(builder_entry("kgps.setCertificateNotBefore", "setCertificateNotBefore", {kDate},
                         kBuilderRet, 0, VD::Date, AC::KeystoreParam));
    db.add(builder_entry("kgps.setRandomizedEncryptionRequired", "setRandomizedEncryptionRequired",
                         {"Z"}, kBuilderRet, 0, VD::Boolean, AC::RandomizedEncryption));
    db.add(builder_entry("kgps.setIsStrongBoxBacked", "setIsStrongBoxBacked", {"Z"}, kBuilderRet,
                         0, VD::Boolean, AC::StrongBox));
    db.add(builder_entry("kgps.setUserAuthenticationValidityDurationSeconds",
                         "setUserAuthenticationValidityDurationSeconds", {"I"}, kBuilderRet, 0,
                         VD::Int, AC::Auth));
    db.add(builder_entry("kgps.setKeyValidityForOriginationEnd", "setKeyValidityForOriginationEnd",
                         {kDate}, kBuilderRet, 0, VD::Date, AC::KeystoreParam));
    db.add(builder_entry("kgps.setSignaturePaddings", "setSignaturePaddings", {kStringArray},
                         kBuilderRet, 0, VD::StringArray, AC::KeystoreParam));
    db.add(builder_entry("kgps.setUserAuthenticationParameters", "setUserAuthenticationParameters",
                         {"I", "I"}, kBuilderRet, 0, VD::Int, AC::Auth));
    db.add(builder_entry("kgps.setInvalidatedByBiometricEnrollment",
                         "setInvalidatedByBiometricEnrollment", {"Z"}, kBuilderRet, 0, VD::Boolean,
                         AC::Auth));
    db.add(builder_entry("kgps.setAlgorithmParameterSpec", "setAlgorithmParameterSpec",
                         {"Ljava/security/spec/AlgorithmParameterSpec;"}, kBuilderRet,
                         std::nullopt, VD::None, AC::KeystoreParam));
    db.add(builder_entry("kgps.setAttestationChallenge", "setAttestationChallenge", {"[B"},
                         kBuilderRet, 0, VD::ByteArray, AC::Attestation));
    db.add(builder_entry("kgps.setKeyValidityEnd", "setKeyValidityEnd", {kDate}, kBuilderRet, 0,
                         VD::Date, AC::KeystoreParam));
    db.add(builder_entry("kgps.setKeyValidityStart", "setKeyValidityStart", {kDate}, kBuilderRet,
                         0, VD::Date, AC::KeystoreParam));
    db.add(builder_entry("kgps.setUnlockedDeviceRequired", "setUnlockedDeviceRequired", {"Z"},
                         kBuilderRet, 0, VD::Boolean, AC::Auth));
    db.add(builder_entry("kgps.setKeyValidityForConsumptionEnd", "setKeyValidityForConsumptionEnd",
                         {kDate}, kBuilderRet, 0, VD::Date, AC::KeystoreParam));
    db.add(builder_entry("kgps.setUserAuthenticationValidWhileOnBody",
                         "setUserAuthenticationValidWhileOnBody", {"Z"}, kBuilderRet, 0,
                         VD::Boolean, AC::Auth));
    db.add(builder_entry("kgps.setUserConfirmationRequired", "setUserConfirmationRequired", {"Z"},
                         kBuilderRet, 0, VD::Boolean, AC::Auth));
    db.add(builder_entry("kgps.setUserPresenceRequired", "setUserPresenceRequired", {"Z"},
                         kBuilderRet, 0, VD::Boolean, AC::Auth));
    // Java / AndroidX endpoints that select a keystore provider
    db.add(entry("jks.getInstance", "java.security.KeyStore", "getInstance", {kString},
                 "Ljava/security/KeyStore;", 0, VD::String, AC::JavaProvider));
    db.add(entry("kgen.getInstance", "javax.crypto.KeyGenerator", "getInstance",
                 {kString, kString}, "Ljavax/crypto/KeyGenerator;", 1, VD::String,
                 AC::JavaProvider));
    db.add(entry("kpgen.getInstance", "java.security.KeyPairGenerator", "getInstance",
                 {kString, kString}, "Ljava/security/KeyPairGenerator;", 1, VD::String,
                 AC::JavaProvider));
    db.add(entry("cipher.getInstance", "javax.crypto.Cipher", "getInstance", {kString},
                 "Ljavax/crypto/Cipher;", 0, VD::String, AC::JavaProvider));
    db.add(entry("masterkey.builder.init", "androidx.security.crypto.MasterKey$Builder", "<init>",
                 {"Landroid/content/Context;"}, "V", std::nullopt, VD::None, AC::Other));
    db.add(entry("keyprotection.builder.init", "android.security.keystore.KeyProtection$Builder",
                 "<init>", {"I"}, "V", 0, VD::Int, AC::Other));
    return db;
}

const std::vector<std::string> kDefaultNeedles = {
    "android/security/keystore",
    "AndroidKeyStore",
    "AndroidKeyStoreBCWorkaround",
};

PrefilterResult keyword_prefilter(const std::filesystem::path& app_dir,
                                  const std::vector<std::string>& needles) {
    PrefilterResult result;
    for (const auto& file : smali_files(app_dir)) {
        std::string text;
        try {
            text = read_file(file);
        } catch (const std::exception& e) {
            result.warnings.push_back(std::string("unreadable file: ") + e.what());
            continue;
        }
        std::string rel = std::filesystem::relative(file, app_dir).generic_string();
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            for (const auto& needle : needles) {
                for (size_t pos = line.find(needle); pos != std::string::npos;
                     pos = line.find(needle, pos + 1)) {
                    result.hits.push_back({needle, rel, lineno});
                }
            }
        }
    }
    std::sort(result.hits.begin(), result.hits.end());
    result.matched = !result.hits.empty();
    return result;
}

std::string package_of(const std::string& class_name) {
    size_t pos = class_name.rfind('.');
    return pos == std::string::npos ? std::string() : class_name.substr(0, pos);
}

const ResolvedValue* ApiCallSite::arg(int index) const {
    for (const auto& a : resolved_args)
        if (a.index == index) return &a.value;
    return nullptr;
}

std::vector<ApiCallSite> find_call_sites(const AppIR& app, const SignatureDb& db) {
    std::vector<ApiCallSite> sites;
    for (const auto& [cls_name, cls] : app.classes) {
        for (const auto& method : cls.methods) {
            for (const auto& insn : method.instructions) {
                const auto* inv = insn.as<InvokeInsn>();
                if (!inv) continue;
                const ApiSignature* api = db.match(inv->target);
                if (!api) continue;
                ApiCallSite site;
                site.app_id = app.app_id;
                site.callee = api->api_id;
                site.caller = method.signature;
                site.caller_package = package_of(method.signature.class_name);
                site.source_line = insn.source_line;
                sites.push_back(std::move(site));
            }
        }
    }
    std::sort(sites.begin(), sites.end(), [](const ApiCallSite& a, const ApiCallSite& b) {
        return std::tie(a.caller.class_name, a.caller, a.source_line, a.callee) <
               std::tie(b.caller.class_name, b.caller, b.source_line, b.callee);
    });
    char buf[16];
    for (size_t i = 0; i < sites.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "cs%04zu", i);
        sites[i].callsite_id = buf;
    }
    return sites;
}

}  // namespace keyscan
