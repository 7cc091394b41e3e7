#ifndef KEYSCAN_SIGDB_HPP
#define KEYSCAN_SIGDB_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "keyscan/smali_ir.hpp"
#include "keyscan/values.hpp"

namespace keyscan {

enum class ValueDomain { Boolean, Int, String, StringArray, Date, ByteArray, None };

enum class ApiCategory {
    KeystoreInit,
    KeystoreParam,
    StrongBox,
    Auth,
    RandomizedEncryption,
    Attestation,
    JavaProvider,
    Other,
};

std::string to_string(ValueDomain d);
std::string to_string(ApiCategory c);
ValueDomain value_domain_from_string(const std::string& s);
ApiCategory api_category_from_string(const std::string& s);

// Categories covered by the android.security.keystore prefilter needles.
bool is_keystore_category(ApiCategory c);

struct ApiSignature {
    std::string api_id;
    MethodSignature signature;
    std::optional<int> arg_of_interest;  // 0-based, excluding receiver
    ValueDomain value_domain = ValueDomain::None;
    ApiCategory category = ApiCategory::Other;
};

struct DuplicateApiId : std::runtime_error {
    explicit DuplicateApiId(const std::string& id)
        : std::runtime_error("duplicate api_id: " + id) {}
};
struct BadDescriptor : std::runtime_error {
    explicit BadDescriptor(const std::string& what) : std::runtime_error(what) {}
};

class SignatureDb {
public:
    static SignatureDb from_json_text(const std::string& text);
    static SignatureDb from_file(const std::filesystem::path& path);
    // The shipped default set: the KeyGenParameterSpec.Builder surface plus
    // the Java/AndroidX endpoints that select a keystore provider.
    static SignatureDb builtin_default();

    const std::vector<ApiSignature>& entries() const { return entries_; }
    const ApiSignature* find_by_id(const std::string& api_id) const;
    const ApiSignature* match(const MethodSignature& sig) const;

    std::string to_json_text() const;

private:
    void add(ApiSignature sig);
    std::vector<ApiSignature> entries_;
    std::map<std::string, size_t> by_id_;
    std::map<MethodSignature, size_t> by_signature_;
};

struct PrefilterHit {
    std::string needle;
    std::string file;  // path relative to the app root, '/' separators
    int line = 0;
    auto operator<=>(const PrefilterHit&) const = default;
};

struct PrefilterResult {
    bool matched = false;
    std::vector<PrefilterHit> hits;
    std::vector<std::string> warnings;
};

extern const std::vector<std::string> kDefaultNeedles;

// Case-sensitive substring scan over the raw smali text of an app dir,
// before any IR construction.
PrefilterResult keyword_prefilter(const std::filesystem::path& app_dir,
                                  const std::vector<std::string>& needles = kDefaultNeedles);

struct ApiCallSite {
    std::string app_id;
    std::string callsite_id;
    std::string callee;  // api_id
    MethodSignature caller;
    std::string caller_package;  // class name minus last component
    int source_line = 0;
    struct ResolvedArg {
        int index = 0;
        ResolvedValue value;
    };
    std::vector<ResolvedArg> resolved_args;
    // Def-site line of the builder object the receiver register traces to;
    // empty when untraceable. Lets configs be assembled from persisted
    // results without re-slicing.
    std::string receiver_group;

    const ResolvedValue* arg(int index) const;
};

std::string package_of(const std::string& class_name);

// One ApiCallSite per Invoke whose target exactly equals a DB signature.
// resolved_args left empty; ordering is (class, method, source_line).
std::vector<ApiCallSite> find_call_sites(const AppIR& app, const SignatureDb& db);

}  // namespace keyscan

#endif
