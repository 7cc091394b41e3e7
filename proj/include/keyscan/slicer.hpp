#ifndef KEYSCAN_SLICER_HPP
#define KEYSCAN_SLICER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "keyscan/sigdb.hpp"
#include "keyscan/smali_ir.hpp"
#include "keyscan/values.hpp"

namespace keyscan {

// android.security.keystore.KeyProperties purpose flags.
struct PurposeFlag {
    std::int64_t bit;
    const char* name;
};
inline constexpr PurposeFlag kPurposeFlags[] = {
    {1, "ENCRYPT"},   {2, "DECRYPT"},    {4, "SIGN"},       {8, "VERIFY"},
    {32, "WRAP_KEY"}, {64, "AGREE_KEY"}, {128, "ATTEST_KEY"},
};

struct PurposeSet {
    std::vector<std::string> names;  // known flags in bit order, then UNKNOWN(bit)
    bool empty_mask = false;

    std::string to_string() const;  // "ENCRYPT|DECRYPT"
    bool contains(const std::string& name) const;
};

PurposeSet decode_purposes(std::int64_t mask);

// Per-method partition into basic blocks with reaching definitions.
// Blocks split at labels and after branches; return*/throw terminate a block
// without fallthrough. A definition is an instruction index paired with the
// registers it writes.
class BasicBlockIndex {
public:
    explicit BasicBlockIndex(const SmaliMethod& method);

    // Definition indices of `reg` reaching instruction `index` (before it
    // executes). Empty when nothing in this method defines the register on
    // any path.
    std::set<int> reaching_defs(int index, const std::string& reg) const;

    int block_of(int index) const { return block_of_[index]; }
    const SmaliMethod& method() const { return method_; }

private:
    struct Block {
        int first = 0;
        int last = 0;  // inclusive
        std::vector<int> succs;
    };

    const SmaliMethod& method_;
    std::vector<Block> blocks_;
    std::vector<int> block_of_;
    // register -> defs live at block entry
    std::vector<std::map<std::string, std::set<int>>> in_;
};

// Registers written by an instruction. Unknown value-producing opcodes
// clobber their first register operand so stale constants are never
// believed; wide ops clobber the pair.
std::vector<std::string> defined_registers(const Instruction& insn);

// Parses "new-array vD, vS, [T" out of an opaque opcode line; the IR keeps
// unknown opcodes as raw text.
struct NewArrayInfo {
    std::string dst;
    std::string size_reg;
    std::string element_type;
};
std::optional<NewArrayInfo> parse_new_array(const Instruction& insn);

// Backward slice of one register at one use site.
ResolvedValue resolve_register(const BasicBlockIndex& index, int use_index, const std::string& reg,
                               ValueDomain domain);

// Fills site.resolved_args for the DB entry's argument(s) of interest.
// keystore-init and java-provider entries resolve every argument.
ApiCallSite resolve_args(const SmaliMethod& method, ApiCallSite site, const ApiSignature& api);

// Object identity of the receiver register at a call site: the instruction
// index of the new-instance (or other def) the register uniquely traces to.
std::optional<int> resolve_receiver_def(const BasicBlockIndex& index, int use_index,
                                        const std::string& reg);

}  // namespace keyscan

#endif
