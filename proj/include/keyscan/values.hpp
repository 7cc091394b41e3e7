#ifndef KEYSCAN_VALUES_HPP
#define KEYSCAN_VALUES_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace keyscan {

enum class UnresolvedReason {
    MultipleDefs,
    NonConstantDef,
    CrossMethod,
    UnsupportedOp,
    RegisterUndefined,
};

std::string to_string(UnresolvedReason r);
UnresolvedReason unresolved_reason_from_string(const std::string& s);

// Outcome of backward slicing one argument register. Unresolvability is a
// value, not an error.
struct ResolvedValue {
    struct Int {
        std::int64_t value = 0;
        bool operator==(const Int&) const = default;
    };
    struct Bool {
        bool value = false;
        bool operator==(const Bool&) const = default;
    };
    struct Str {
        std::string value;
        bool operator==(const Str&) const = default;
    };
    struct StrArray {
        std::vector<std::string> values;
        bool operator==(const StrArray&) const = default;
    };
    struct Unresolved {
        UnresolvedReason reason = UnresolvedReason::NonConstantDef;
        bool operator==(const Unresolved&) const = default;
    };

    std::variant<Int, Bool, Str, StrArray, Unresolved> kind =
        Unresolved{UnresolvedReason::RegisterUndefined};
    std::vector<int> provenance;  // source lines of the defining instructions

    bool is_resolved() const { return !std::holds_alternative<Unresolved>(kind); }

    static ResolvedValue make_int(std::int64_t v) { return {Int{v}, {}}; }
    static ResolvedValue make_bool(bool v) { return {Bool{v}, {}}; }
    static ResolvedValue make_str(std::string v) { return {Str{std::move(v)}, {}}; }
    static ResolvedValue make_str_array(std::vector<std::string> v) {
        return {StrArray{std::move(v)}, {}};
    }
    static ResolvedValue unresolved(UnresolvedReason r) { return {Unresolved{r}, {}}; }

    bool same_constant(const ResolvedValue& other) const { return kind == other.kind; }
};

}  // namespace keyscan

#endif
