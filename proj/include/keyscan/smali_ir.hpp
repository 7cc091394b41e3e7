#ifndef KEYSCAN_SMALI_IR_HPP
#define KEYSCAN_SMALI_IR_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace keyscan {

// Fully qualified method identity. Class names are dotted
// ("android.security.keystore.KeyGenParameterSpec$Builder"); parameter and
// return descriptors stay in raw smali form ("Ljava/lang/String;", "I",
// "[Ljava/lang/String;").
struct MethodSignature {
    std::string class_name;
    std::string method_name;
    std::vector<std::string> param_descriptors;
    std::string return_descriptor;

    auto operator<=>(const MethodSignature&) const = default;

    // "com.example.Foo->bar(Ljava/lang/String;I)V"
    std::string to_string() const;
    // "Lcom/example/Foo;->bar(Ljava/lang/String;I)V"
    std::string to_smali() const;
};

// "Lcom/example/Foo;" <-> "com.example.Foo"
std::string descriptor_to_dotted(std::string_view descriptor);
std::string dotted_to_descriptor(std::string_view dotted);

// Register slots a parameter list occupies (J and D take two).
int descriptor_register_width(std::string_view descriptor);

// Splits "(Ljava/lang/String;I)" content into descriptor tokens.
// Throws std::invalid_argument on malformed input.
std::vector<std::string> parse_param_descriptors(std::string_view params);

// Parses "Lcom/Foo;->bar(Ljava/lang/String;I)V".
MethodSignature parse_method_reference(std::string_view ref);

enum class InvokeKind { Virtual, Direct, Static, Interface, Super };

struct ConstInsn {
    std::string reg;
    std::int64_t value = 0;
};
struct ConstStringInsn {
    std::string reg;
    std::string value;
};
struct ConstWideInsn {
    std::string reg;
    std::int64_t value = 0;
};
struct MoveInsn {
    std::string dst;
    std::string src;
};
struct MoveResultInsn {
    std::string reg;
};
struct NewInstanceInsn {
    std::string reg;
    std::string class_name;  // dotted
};
struct InvokeInsn {
    InvokeKind kind = InvokeKind::Virtual;
    MethodSignature target;
    std::vector<std::string> arg_regs;  // receiver first for non-static kinds
};
struct ArrayPutInsn {
    std::string value_reg;
    std::string array_reg;
    std::string index_reg;
};
struct FilledNewArrayInsn {
    std::vector<std::string> element_regs;
    std::string element_type;  // raw descriptor, e.g. "[Ljava/lang/String;"
};
struct StaticGetInsn {
    std::string reg;
    std::string field_ref;
};
struct LabelInsn {
    std::string name;
};
struct BranchInsn {
    std::vector<std::string> targets;
    bool conditional = false;  // if-* has fallthrough, goto does not
};
struct OtherInsn {
    std::string text;  // full opcode line as written
};

using InsnOp = std::variant<ConstInsn, ConstStringInsn, ConstWideInsn, MoveInsn, MoveResultInsn,
                            NewInstanceInsn, InvokeInsn, ArrayPutInsn, FilledNewArrayInsn,
                            StaticGetInsn, LabelInsn, BranchInsn, OtherInsn>;

struct Instruction {
    InsnOp op;
    int source_line = 0;

    template <class T>
    const T* as() const {
        return std::get_if<T>(&op);
    }
};

struct SmaliMethod {
    MethodSignature signature;
    int register_count = 0;
    std::vector<Instruction> instructions;
    std::set<std::string> access_flags;

    bool is_static() const { return access_flags.count("static") > 0; }
};

struct SmaliClass {
    std::string name;  // dotted
    std::string superclass;
    std::vector<std::string> interfaces;
    std::set<std::string> access_flags;
    std::vector<SmaliMethod> methods;
};

struct AppIR {
    std::string app_id;
    std::map<std::string, SmaliClass> classes;  // keyed by dotted class name
    int file_count = 0;
    std::vector<std::string> warnings;
};

struct MalformedSmali : std::runtime_error {
    MalformedSmali(int line_, std::string reason_)
        : std::runtime_error("malformed smali at line " + std::to_string(line_) + ": " + reason_),
          line(line_),
          reason(std::move(reason_)) {}
    int line;
    std::string reason;
};

struct EmptyApp : std::runtime_error {
    explicit EmptyApp(const std::string& what) : std::runtime_error(what) {}
};

SmaliClass parse_smali_file(const std::string& text);

// Parses every .smali file under the root's smali* directories (apktool
// layout). Per-file failures become warnings; zero parsed classes is an
// EmptyApp error. file_count counts files attempted.
AppIR parse_app_dir(const std::filesystem::path& root, const std::string& app_id);

// Lists the smali* directories of an app root in deterministic order.
std::vector<std::filesystem::path> smali_dirs(const std::filesystem::path& root);

// Sorted .smali files of one app (deterministic across directory orderings).
std::vector<std::filesystem::path> smali_files(const std::filesystem::path& root);

}  // namespace keyscan

#endif
