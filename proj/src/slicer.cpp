#include "keyscan/slicer.hpp"

#include <algorithm>
#include <cassert>

#include "keyscan/util.hpp"

namespace keyscan {

std::string PurposeSet::to_string() const {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += '|';
        out += n;
    }
    return out;
}

bool PurposeSet::contains(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

PurposeSet decode_purposes(std::int64_t mask) {
    PurposeSet out;
    out.empty_mask = mask == 0;
    std::int64_t seen = 0;
    for (const auto& f : kPurposeFlags) {
        if (mask & f.bit) {
            out.names.push_back(f.name);
            seen |= f.bit;
        }
    }
    std::int64_t rest = mask & ~seen;
    for (int bit = 0; bit < 63; ++bit) {
        std::int64_t v = std::int64_t{1} << bit;
        if (rest & v) out.names.push_back("UNKNOWN(" + std::to_string(v) + ")");
    }
    return out;
}

namespace {

std::string register_pair_high(const std::string& reg) {
    auto n = parse_int_literal(std::string_view(reg).substr(1));
    if (!n) return {};
    return reg.substr(0, 1) + std::to_string(*n + 1);
}

bool wide_mnemonic(const std::string& m) {
    return m.find("wide") != std::string::npos || m.find("long") != std::string::npos ||
           m.find("double") != std::string::npos;
}

// Opcodes whose first register operand is read, not written.
bool first_operand_is_source(const std::string& mnemonic) {
    static const char* kPrefixes[] = {"aput",          "iput",          "sput",
                                      "if-",           "goto",          "return",
                                      "throw",         "monitor",       "nop",
                                      "packed-switch", "sparse-switch", "fill-array-data",
                                      "check-cast",    "invoke"};
    for (const char* p : kPrefixes)
        if (starts_with(mnemonic, p)) return true;
    return false;
}

bool is_register_token(std::string_view tok) {
    if (tok.size() < 2 || (tok[0] != 'v' && tok[0] != 'p')) return false;
    for (size_t i = 1; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    return true;
}

std::vector<std::string> other_tokens(const std::string& text) {
    std::string spaced = text;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    return split_ws(spaced);
}

bool is_terminator(const Instruction& insn) {
    const auto* other = insn.as<OtherInsn>();
    if (!other) return false;
    return starts_with(other->text, "return") || starts_with(other->text, "throw");
}

}  // namespace

std::optional<NewArrayInfo> parse_new_array(const Instruction& insn) {
    const auto* other = insn.as<OtherInsn>();
    if (!other || !starts_with(other->text, "new-array")) return std::nullopt;
    auto toks = other_tokens(other->text);
    if (toks.size() < 4 || !is_register_token(toks[1]) || !is_register_token(toks[2]))
        return std::nullopt;
    return NewArrayInfo{toks[1], toks[2], toks[3]};
}

std::vector<std::string> defined_registers(const Instruction& insn) {
    std::vector<std::string> defs;
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ConstInsn>) defs.push_back(o.reg);
            else if constexpr (std::is_same_v<T, ConstStringInsn>) defs.push_back(o.reg);
            else if constexpr (std::is_same_v<T, ConstWideInsn>) {
                defs.push_back(o.reg);
                if (auto high = register_pair_high(o.reg); !high.empty()) defs.push_back(high);
            } else if constexpr (std::is_same_v<T, MoveInsn>) defs.push_back(o.dst);
            else if constexpr (std::is_same_v<T, MoveResultInsn>) defs.push_back(o.reg);
            else if constexpr (std::is_same_v<T, NewInstanceInsn>) defs.push_back(o.reg);
            else if constexpr (std::is_same_v<T, StaticGetInsn>) defs.push_back(o.reg);
            else if constexpr (std::is_same_v<T, OtherInsn>) {
                auto toks = other_tokens(o.text);
                if (toks.size() >= 2 && is_register_token(toks[1]) &&
                    !first_operand_is_source(toks[0])) {
                    defs.push_back(toks[1]);
                    if (wide_mnemonic(toks[0]))
                        if (auto high = register_pair_high(toks[1]); !high.empty())
                            defs.push_back(high);
                }
            }
        },
        insn.op);
    return defs;
}

BasicBlockIndex::BasicBlockIndex(const SmaliMethod& method) : method_(method) {
    const auto& insns = method.instructions;
    int n = static_cast<int>(insns.size());
    block_of_.assign(n, 0);
    if (n == 0) return;

    std::vector<char> leader(n, 0);
    leader[0] = 1;
    for (int i = 0; i < n; ++i) {
        if (insns[i].as<LabelInsn>()) leader[i] = 1;
        if ((insns[i].as<BranchInsn>() || is_terminator(insns[i])) && i + 1 < n)
            leader[i + 1] = 1;
    }
    std::map<std::string, int> label_block;
    for (int i = 0; i < n; ++i) {
        if (leader[i]) {
            Block b;
            b.first = i;
            b.last = i;
            blocks_.push_back(b);
        }
        blocks_.back().last = i;
        block_of_[i] = static_cast<int>(blocks_.size()) - 1;
        if (const auto* lbl = insns[i].as<LabelInsn>()) label_block[lbl->name] = block_of_[i];
    }
    for (size_t b = 0; b < blocks_.size(); ++b) {
        const Instruction& last = insns[blocks_[b].last];
        if (const auto* br = last.as<BranchInsn>()) {
            for (const auto& t : br->targets) {
                auto it = label_block.find(t);
                if (it != label_block.end()) blocks_[b].succs.push_back(it->second);
            }
            if (br->conditional && b + 1 < blocks_.size())
                blocks_[b].succs.push_back(static_cast<int>(b) + 1);
        } else if (!is_terminator(last) && b + 1 < blocks_.size()) {
            blocks_[b].succs.push_back(static_cast<int>(b) + 1);
        }
        std::sort(blocks_[b].succs.begin(), blocks_[b].succs.end());
        blocks_[b].succs.erase(std::unique(blocks_[b].succs.begin(), blocks_[b].succs.end()),
                               blocks_[b].succs.end());
    }

    // reaching definitions to a fixed point
    in_.assign(blocks_.size(), {});
    std::vector<std::map<std::string, std::set<int>>> out(blocks_.size());
    auto transfer = [&](size_t b) {
        auto state = in_[b];
        for (int i = blocks_[b].first; i <= blocks_[b].last; ++i) {
            for (const auto& reg : defined_registers(insns[i])) state[reg] = {i};
        }
        return state;
    };
    for (size_t b = 0; b < blocks_.size(); ++b) out[b] = transfer(b);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t b = 0; b < blocks_.size(); ++b) {
            std::map<std::string, std::set<int>> merged;
            for (size_t p = 0; p < blocks_.size(); ++p) {
                for (int s : blocks_[p].succs) {
                    if (s != static_cast<int>(b)) continue;
                    for (const auto& [reg, defs] : out[p]) merged[reg].insert(defs.begin(), defs.end());
                }
            }
            if (merged != in_[b]) {
                in_[b] = std::move(merged);
                out[b] = transfer(b);
                changed = true;
            }
        }
    }
}

std::set<int> BasicBlockIndex::reaching_defs(int index, const std::string& reg) const {
    if (index < 0 || index >= static_cast<int>(block_of_.size())) return {};
    int b = block_of_[index];
    std::set<int> defs;
    auto it = in_[b].find(reg);
    if (it != in_[b].end()) defs = it->second;
    for (int i = blocks_[b].first; i < index; ++i) {
        for (const auto& d : defined_registers(method_.instructions[i])) {
            if (d == reg) defs = {i};
        }
    }
    return defs;
}

namespace {

class Resolver {
public:
    explicit Resolver(const BasicBlockIndex& index) : index_(index) {}

    ResolvedValue resolve(int at_index, const std::string& reg) {
        auto key = std::make_pair(at_index, reg);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            if (!it->second) return ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
            return *it->second;
        }
        cache_[key] = std::nullopt;  // in progress; a revisit is a cycle
        ResolvedValue result = resolve_uncached(at_index, reg);
        cache_[key] = result;
        return result;
    }

    // Entry point that also knows the value domain, so array patterns are
    // attempted where they apply.
    ResolvedValue resolve_for_domain(int use_index, const std::string& reg, ValueDomain domain) {
        if (domain == ValueDomain::StringArray) {
            auto defs = index_.reaching_defs(use_index, reg);
            if (defs.size() == 1) {
                int d = *defs.begin();
                if (auto na = parse_new_array(index_.method().instructions[d]);
                    na && na->dst == reg) {
                    return apply_domain(resolve_aput_array(d, *na, use_index, reg), domain);
                }
            }
        }
        return apply_domain(resolve(use_index, reg), domain);
    }

    static ResolvedValue apply_domain(ResolvedValue v, ValueDomain domain) {
        using RV = ResolvedValue;
        if (!v.is_resolved() || domain == ValueDomain::None) return v;
        auto wrong = [&v]() {
            RV u = RV::unresolved(UnresolvedReason::UnsupportedOp);
            u.provenance = v.provenance;
            return u;
        };
        switch (domain) {
            case ValueDomain::Boolean:
                if (const auto* i = std::get_if<RV::Int>(&v.kind)) {
                    if (i->value == 0 || i->value == 1) {
                        RV b = RV::make_bool(i->value == 1);
                        b.provenance = v.provenance;
                        return b;
                    }
                }
                return wrong();
            case ValueDomain::Int:
                return std::holds_alternative<RV::Int>(v.kind) ? v : wrong();
            case ValueDomain::String:
                return std::holds_alternative<RV::Str>(v.kind) ? v : wrong();
            case ValueDomain::StringArray:
                return std::holds_alternative<RV::StrArray>(v.kind) ? v : wrong();
            case ValueDomain::Date:
            case ValueDomain::ByteArray:
                // object-valued parameters never resolve to a literal
                return wrong();
            case ValueDomain::None: return v;
        }
        return v;
    }

private:
    ResolvedValue resolve_uncached(int at_index, const std::string& reg) {
        auto defs = index_.reaching_defs(at_index, reg);
        if (defs.empty()) {
            return ResolvedValue::unresolved(!reg.empty() && reg[0] == 'p'
                                                 ? UnresolvedReason::CrossMethod
                                                 : UnresolvedReason::RegisterUndefined);
        }
        std::vector<ResolvedValue> values;
        for (int d : defs) values.push_back(eval_def(d, reg));
        if (values.size() == 1) return values[0];
        for (const auto& v : values) {
            if (!v.is_resolved() || !v.same_constant(values.front()))
                return ResolvedValue::unresolved(UnresolvedReason::MultipleDefs);
        }
        ResolvedValue agreed = values.front();
        for (const auto& v : values)
            agreed.provenance.insert(agreed.provenance.end(), v.provenance.begin(),
                                     v.provenance.end());
        std::sort(agreed.provenance.begin(), agreed.provenance.end());
        agreed.provenance.erase(std::unique(agreed.provenance.begin(), agreed.provenance.end()),
                                agreed.provenance.end());
        return agreed;
    }

    ResolvedValue eval_def(int d, const std::string& reg) {
        const Instruction& insn = index_.method().instructions[d];
        ResolvedValue out;
        if (const auto* c = insn.as<ConstInsn>()) {
            out = ResolvedValue::make_int(c->value);
        } else if (const auto* cw = insn.as<ConstWideInsn>()) {
            // querying the high half of the pair never yields a constant
            out = cw->reg == reg ? ResolvedValue::make_int(cw->value)
                                 : ResolvedValue::unresolved(UnresolvedReason::UnsupportedOp);
        } else if (const auto* cs = insn.as<ConstStringInsn>()) {
            out = ResolvedValue::make_str(cs->value);
        } else if (const auto* mv = insn.as<MoveInsn>()) {
            out = resolve(d, mv->src);
        } else if (insn.as<MoveResultInsn>()) {
            out = eval_move_result(d);
        } else if (insn.as<NewInstanceInsn>() || insn.as<StaticGetInsn>()) {
            out = ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
        } else {
            out = ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
        }
        out.provenance.push_back(insn.source_line);
        std::sort(out.provenance.begin(), out.provenance.end());
        out.provenance.erase(std::unique(out.provenance.begin(), out.provenance.end()),
                             out.provenance.end());
        return out;
    }

    ResolvedValue eval_move_result(int d) {
        if (d == 0) return ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
        const Instruction& prev = index_.method().instructions[d - 1];
        if (const auto* fa = prev.as<FilledNewArrayInsn>()) {
            std::vector<std::string> elems;
            for (const auto& er : fa->element_regs) {
                ResolvedValue ev = resolve(d - 1, er);
                if (const auto* s = std::get_if<ResolvedValue::Str>(&ev.kind)) {
                    elems.push_back(s->value);
                } else if (!ev.is_resolved()) {
                    return ev;
                } else {
                    return ResolvedValue::unresolved(UnresolvedReason::UnsupportedOp);
                }
            }
            return ResolvedValue::make_str_array(std::move(elems));
        }
        if (prev.as<InvokeInsn>())
            return ResolvedValue::unresolved(UnresolvedReason::CrossMethod);
        return ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
    }

    // new-array + aput-object pattern; creation, stores and use must share a
    // basic block so the store sequence is the execution order.
    ResolvedValue resolve_aput_array(int def_index, const NewArrayInfo& na, int use_index,
                                     const std::string& reg) {
        const auto& insns = index_.method().instructions;
        if (index_.block_of(def_index) != index_.block_of(use_index) || def_index >= use_index)
            return ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);

        ResolvedValue size_v = resolve(def_index, na.size_reg);
        const auto* size_i = std::get_if<ResolvedValue::Int>(&size_v.kind);
        if (!size_i || size_i->value < 0)
            return ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
        auto size = static_cast<size_t>(size_i->value);

        std::vector<std::optional<std::string>> elems(size);
        std::vector<int> prov{insns[def_index].source_line};
        for (int i = def_index + 1; i < use_index; ++i) {
            if (const auto* ap = insns[i].as<ArrayPutInsn>()) {
                auto array_defs = index_.reaching_defs(i, ap->array_reg);
                bool is_this_array = array_defs == std::set<int>{def_index};
                if (!is_this_array) {
                    // a store through a possible alias spoils the contents
                    bool provably_other =
                        array_defs.size() == 1 &&
                        (parse_new_array(insns[*array_defs.begin()]).has_value() ||
                         insns[*array_defs.begin()].as<FilledNewArrayInsn>() != nullptr) &&
                        *array_defs.begin() != def_index;
                    if (provably_other) continue;
                    return ResolvedValue::unresolved(UnresolvedReason::NonConstantDef);
                }
                ResolvedValue idx = resolve(i, ap->index_reg);
                ResolvedValue val = resolve(i, ap->value_reg);
                const auto* idx_i = std::get_if<ResolvedValue::Int>(&idx.kind);
                const auto* val_s = std::get_if<ResolvedValue::Str>(&val.kind);
                if (!idx_i || !val_s) {
                    if (!val.is_resolved()) return val;
                    if (!idx.is_resolved()) return idx;
                    return ResolvedValue::unresolved(UnresolvedReason::UnsupportedOp);
                }
                if (idx_i->value < 0 || idx_i->value >= static_cast<std::int64_t>(size))
                    return ResolvedValue::unresolved(UnresolvedReason::UnsupportedOp);
                elems[static_cast<size_t>(idx_i->value)] = val_s->value;
                prov.push_back(insns[i].source_line);
            } else if (const auto* inv = insns[i].as<InvokeInsn>()) {
                // a callee receiving the array may mutate it
                for (const auto& r : inv->arg_regs) {
                    auto rdefs = index_.reaching_defs(i, r);
                    if (rdefs == std::set<int>{def_index})
                        return ResolvedValue::unresolved(UnresolvedReason::CrossMethod);
                }
            }
        }
        std::vector<std::string> final_elems;
        for (const auto& e : elems) {
            if (!e) return ResolvedValue::unresolved(UnresolvedReason::UnsupportedOp);
            final_elems.push_back(*e);
        }
        ResolvedValue out = ResolvedValue::make_str_array(std::move(final_elems));
        std::sort(prov.begin(), prov.end());
        out.provenance = std::move(prov);
        return out;
    }

    const BasicBlockIndex& index_;
    std::map<std::pair<int, std::string>, std::optional<ResolvedValue>> cache_;
};

ValueDomain infer_domain(const std::string& descriptor) {
    if (descriptor == "Z") return ValueDomain::Boolean;
    if (descriptor == "I" || descriptor == "S" || descriptor == "B" || descriptor == "J")
        return ValueDomain::Int;
    if (descriptor == "Ljava/lang/String;") return ValueDomain::String;
    if (descriptor == "[Ljava/lang/String;") return ValueDomain::StringArray;
    if (descriptor == "Ljava/util/Date;") return ValueDomain::Date;
    if (descriptor == "[B") return ValueDomain::ByteArray;
    return ValueDomain::None;
}

int find_invoke_index(const SmaliMethod& method, const ApiCallSite& site) {
    for (size_t i = 0; i < method.instructions.size(); ++i) {
        const auto& insn = method.instructions[i];
        if (insn.source_line == site.source_line && insn.as<InvokeInsn>())
            return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

ApiCallSite resolve_args(const SmaliMethod& method, ApiCallSite site, const ApiSignature& api) {
    site.resolved_args.clear();
    int idx = find_invoke_index(method, site);
    if (idx < 0) return site;
    const auto* inv = method.instructions[idx].as<InvokeInsn>();

    BasicBlockIndex block_index(method);
    Resolver resolver(block_index);

    int receiver_slots = inv->kind == InvokeKind::Static ? 0 : 1;
    bool all_args = api.category == ApiCategory::KeystoreInit ||
                    api.category == ApiCategory::JavaProvider;
    int reg_slot = receiver_slots;
    for (size_t p = 0; p < api.signature.param_descriptors.size(); ++p) {
        const std::string& desc = api.signature.param_descriptors[p];
        bool of_interest = api.arg_of_interest && *api.arg_of_interest == static_cast<int>(p);
        if (all_args || of_interest) {
            ValueDomain domain = of_interest && api.value_domain != ValueDomain::None
                                     ? api.value_domain
                                     : infer_domain(desc);
            if (domain != ValueDomain::None &&
                reg_slot < static_cast<int>(inv->arg_regs.size())) {
                ApiCallSite::ResolvedArg arg;
                arg.index = static_cast<int>(p);
                arg.value = resolver.resolve_for_domain(idx, inv->arg_regs[reg_slot], domain);
                site.resolved_args.push_back(std::move(arg));
            }
        }
        reg_slot += descriptor_register_width(desc);
    }

    if (inv->kind != InvokeKind::Static && !inv->arg_regs.empty()) {
        if (auto def = resolve_receiver_def(block_index, idx, inv->arg_regs[0]))
            site.receiver_group =
                "obj" + std::to_string(method.instructions[*def].source_line);
    }
    return site;
}

ResolvedValue resolve_register(const BasicBlockIndex& index, int use_index, const std::string& reg,
                               ValueDomain domain) {
    Resolver resolver(index);
    return resolver.resolve_for_domain(use_index, reg, domain);
}

std::optional<int> resolve_receiver_def(const BasicBlockIndex& index, int use_index,
                                        const std::string& reg) {
    const auto& insns = index.method().instructions;
    int at = use_index;
    std::string cur = reg;
    std::set<std::pair<int, std::string>> visited;
    while (true) {
        if (!visited.insert({at, cur}).second) return std::nullopt;
        auto defs = index.reaching_defs(at, cur);
        if (defs.size() != 1) return std::nullopt;
        int d = *defs.begin();
        const Instruction& insn = insns[d];
        if (insn.as<NewInstanceInsn>()) return d;
        if (const auto* mv = insn.as<MoveInsn>()) {
            at = d;
            cur = mv->src;
            continue;
        }
        if (insn.as<MoveResultInsn>()) {
            // builder setters return the receiver; follow the chain through
            // fluent-style call results
            if (d == 0) return std::nullopt;
            const auto* inv = insns[d - 1].as<InvokeInsn>();
            if (!inv || inv->kind == InvokeKind::Static || inv->arg_regs.empty())
                return std::nullopt;
            if (inv->target.return_descriptor != dotted_to_descriptor(inv->target.class_name))
                return std::nullopt;
            at = d - 1;
            cur = inv->arg_regs[0];
            continue;
        }
        return std::nullopt;
    }
}

}  // namespace keyscan
