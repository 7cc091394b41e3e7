#include "keyscan/smali_ir.hpp"

#include <algorithm>
#include <sstream>

#include "keyscan/util.hpp"

namespace keyscan {

std::string descriptor_to_dotted(std::string_view descriptor) {
    std::string out;
    if (descriptor.size() >= 2 && descriptor.front() == 'L' && descriptor.back() == ';') {
        out.assign(descriptor.substr(1, descriptor.size() - 2));
    } else {
        // array or primitive forms keep their shape, slashes still normalized
        out.assign(descriptor);
    }
    std::replace(out.begin(), out.end(), '/', '.');
    return out;
}

std::string dotted_to_descriptor(std::string_view dotted) {
    std::string inner(dotted);
    std::replace(inner.begin(), inner.end(), '.', '/');
    if (!inner.empty() && (inner.front() == '[')) return inner;  // array kept raw
    return "L" + inner + ";";
}

int descriptor_register_width(std::string_view descriptor) {
    return (descriptor == "J" || descriptor == "D") ? 2 : 1;
}

std::vector<std::string> parse_param_descriptors(std::string_view params) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < params.size()) {
        size_t start = i;
        while (i < params.size() && params[i] == '[') ++i;
        if (i >= params.size()) throw std::invalid_argument("dangling array prefix");
        char c = params[i];
        if (c == 'L') {
            size_t semi = params.find(';', i);
            if (semi == std::string_view::npos)
                throw std::invalid_argument("unterminated object descriptor");
            i = semi + 1;
        } else if (std::string_view("ZBSCIJFD").find(c) != std::string_view::npos) {
            ++i;
        } else {
            throw std::invalid_argument(std::string("bad descriptor char '") + c + "'");
        }
        out.emplace_back(params.substr(start, i - start));
    }
    return out;
}

std::string MethodSignature::to_string() const {
    std::string s = class_name + "->" + method_name + "(";
    for (const auto& p : param_descriptors) s += p;
    s += ")" + return_descriptor;
    return s;
}

std::string MethodSignature::to_smali() const {
    std::string s = dotted_to_descriptor(class_name) + "->" + method_name + "(";
    for (const auto& p : param_descriptors) s += p;
    s += ")" + return_descriptor;
    return s;
}

MethodSignature parse_method_reference(std::string_view ref) {
    size_t arrow = ref.find("->");
    if (arrow == std::string_view::npos) throw std::invalid_argument("missing '->'");
    size_t lparen = ref.find('(', arrow);
    size_t rparen = ref.rfind(')');
    if (lparen == std::string_view::npos || rparen == std::string_view::npos || rparen < lparen)
        throw std::invalid_argument("missing parameter list");
    MethodSignature sig;
    sig.class_name = descriptor_to_dotted(trim(ref.substr(0, arrow)));
    sig.method_name = std::string(ref.substr(arrow + 2, lparen - arrow - 2));
    sig.param_descriptors = parse_param_descriptors(ref.substr(lparen + 1, rparen - lparen - 1));
    sig.return_descriptor = std::string(ref.substr(rparen + 1));
    if (sig.class_name.empty() || sig.method_name.empty() || sig.return_descriptor.empty())
        throw std::invalid_argument("incomplete method reference");
    return sig;
}

namespace {

// "{v0, v1, v2}" or "{v0 .. v5}" or "{}"
std::vector<std::string> parse_register_list(std::string_view text, int line) {
    std::vector<std::string> regs;
    std::string body = trim(text);
    if (body.size() < 2 || body.front() != '{' || body.back() != '}')
        throw MalformedSmali(line, "expected register list");
    body = trim(std::string_view(body).substr(1, body.size() - 2));
    if (body.empty()) return regs;
    if (body.find("..") != std::string::npos) {
        auto parts = split(body, '.');
        std::vector<std::string> ends;
        for (auto& p : parts) {
            auto t = trim(p);
            if (!t.empty()) ends.push_back(t);
        }
        if (ends.size() != 2 || ends[0].size() < 2 || ends[1].size() < 2 ||
            ends[0][0] != ends[1][0])
            throw MalformedSmali(line, "bad register range");
        char kind = ends[0][0];
        auto lo = parse_int_literal(ends[0].substr(1));
        auto hi = parse_int_literal(ends[1].substr(1));
        if (!lo || !hi || *lo > *hi) throw MalformedSmali(line, "bad register range");
        for (std::int64_t n = *lo; n <= *hi; ++n) regs.push_back(kind + std::to_string(n));
        return regs;
    }
    for (auto& piece : split(body, ',')) {
        auto reg = trim(piece);
        if (reg.size() < 2 || (reg[0] != 'v' && reg[0] != 'p'))
            throw MalformedSmali(line, "bad register '" + reg + "'");
        regs.push_back(reg);
    }
    return regs;
}

bool is_register(std::string_view tok) {
    if (tok.size() < 2 || (tok[0] != 'v' && tok[0] != 'p')) return false;
    for (size_t i = 1; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    return true;
}

// Splits an opcode line into mnemonic and comma-separated operands, keeping
// the register-list braces of invoke/filled-new-array intact.
struct OpLine {
    std::string mnemonic;
    std::vector<std::string> operands;
};

OpLine split_opcode_line(const std::string& line, int lineno) {
    OpLine out;
    size_t sp = line.find_first_of(" \t");
    if (sp == std::string::npos) {
        out.mnemonic = line;
        return out;
    }
    out.mnemonic = line.substr(0, sp);
    std::string rest = trim(line.substr(sp));
    if (rest.empty()) return out;
    if (rest.front() == '{') {
        size_t close = rest.find('}');
        if (close == std::string::npos) throw MalformedSmali(lineno, "unterminated register list");
        out.operands.push_back(trim(rest.substr(0, close + 1)));
        rest = trim(rest.substr(close + 1));
        if (!rest.empty() && rest.front() == ',') rest = trim(rest.substr(1));
        if (!rest.empty()) out.operands.push_back(rest);
        return out;
    }
    // split on commas outside quotes
    std::string cur;
    bool in_str = false;
    for (size_t i = 0; i < rest.size(); ++i) {
        char c = rest[i];
        if (c == '"' && (i == 0 || rest[i - 1] != '\\')) in_str = !in_str;
        if (c == ',' && !in_str) {
            out.operands.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.operands.empty()) out.operands.push_back(trim(cur));
    return out;
}

std::string decode_string_literal(std::string_view tok, int line) {
    if (tok.size() < 2 || tok.front() != '"' || tok.back() != '"')
        throw MalformedSmali(line, "expected string literal");
    std::string out;
    for (size_t i = 1; i + 1 < tok.size(); ++i) {
        char c = tok[i];
        if (c == '\\' && i + 2 < tok.size()) {
            char n = tok[++i];
            switch (n) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\'': out += '\''; break;
                case '\\': out += '\\'; break;
                default:
                    out += '\\';
                    out += n;
            }
        } else {
            out += c;
        }
    }
    return out;
}

bool opcode_in_family(const std::string& m, std::string_view base) {
    // "move" matches "move", "move/from16"; not "move-object"
    if (m == base) return true;
    return m.size() > base.size() && starts_with(m, base) && m[base.size()] == '/';
}

std::optional<InvokeKind> invoke_kind_of(const std::string& mnemonic) {
    if (!starts_with(mnemonic, "invoke-")) return std::nullopt;
    std::string k = mnemonic.substr(7);
    if (auto slash = k.find('/'); slash != std::string::npos) k = k.substr(0, slash);
    if (k == "virtual") return InvokeKind::Virtual;
    if (k == "direct") return InvokeKind::Direct;
    if (k == "static") return InvokeKind::Static;
    if (k == "interface") return InvokeKind::Interface;
    if (k == "super") return InvokeKind::Super;
    return std::nullopt;
}

Instruction parse_instruction(const std::string& line, int lineno) {
    Instruction insn;
    insn.source_line = lineno;
    if (line[0] == ':') {
        insn.op = LabelInsn{line.substr(1)};
        return insn;
    }
    OpLine op = split_opcode_line(line, lineno);
    const std::string& m = op.mnemonic;
    auto need = [&](size_t n) {
        if (op.operands.size() != n)
            throw MalformedSmali(lineno, m + ": expected " + std::to_string(n) + " operands");
    };

    if (auto ik = invoke_kind_of(m)) {
        need(2);
        InvokeInsn inv;
        inv.kind = *ik;
        inv.arg_regs = parse_register_list(op.operands[0], lineno);
        try {
            inv.target = parse_method_reference(op.operands[1]);
        } catch (const std::invalid_argument& e) {
            throw MalformedSmali(lineno, std::string("unparsable invoke target: ") + e.what());
        }
        int want = *ik == InvokeKind::Static ? 0 : 1;
        for (const auto& p : inv.target.param_descriptors) want += descriptor_register_width(p);
        if (static_cast<int>(inv.arg_regs.size()) != want)
            throw MalformedSmali(lineno, "invoke register count " +
                                             std::to_string(inv.arg_regs.size()) +
                                             " does not match descriptor arity " +
                                             std::to_string(want));
        insn.op = std::move(inv);
        return insn;
    }
    if (opcode_in_family(m, "const")) {
        need(2);
        auto v = parse_int_literal(op.operands[1]);
        if (!v) throw MalformedSmali(lineno, "bad const literal '" + op.operands[1] + "'");
        insn.op = ConstInsn{op.operands[0], *v};
        return insn;
    }
    if (opcode_in_family(m, "const-string")) {
        need(2);
        insn.op = ConstStringInsn{op.operands[0], decode_string_literal(op.operands[1], lineno)};
        return insn;
    }
    if (opcode_in_family(m, "const-wide")) {
        need(2);
        auto v = parse_int_literal(op.operands[1]);
        if (!v) throw MalformedSmali(lineno, "bad const-wide literal");
        insn.op = ConstWideInsn{op.operands[0], *v};
        return insn;
    }
    if (opcode_in_family(m, "move") || opcode_in_family(m, "move-object")) {
        need(2);
        insn.op = MoveInsn{op.operands[0], op.operands[1]};
        return insn;
    }
    if (opcode_in_family(m, "move-result") || opcode_in_family(m, "move-result-object") ||
        opcode_in_family(m, "move-result-wide")) {
        need(1);
        insn.op = MoveResultInsn{op.operands[0]};
        return insn;
    }
    if (m == "new-instance") {
        need(2);
        insn.op = NewInstanceInsn{op.operands[0], descriptor_to_dotted(op.operands[1])};
        return insn;
    }
    if (m == "aput-object") {
        need(3);
        insn.op = ArrayPutInsn{op.operands[0], op.operands[1], op.operands[2]};
        return insn;
    }
    if (m == "filled-new-array") {
        need(2);
        insn.op = FilledNewArrayInsn{parse_register_list(op.operands[0], lineno), op.operands[1]};
        return insn;
    }
    if (starts_with(m, "sget")) {
        need(2);
        insn.op = StaticGetInsn{op.operands[0], op.operands[1]};
        return insn;
    }
    if (opcode_in_family(m, "goto")) {
        need(1);
        if (op.operands[0].empty() || op.operands[0][0] != ':')
            throw MalformedSmali(lineno, "goto target must be a label");
        insn.op = BranchInsn{{op.operands[0].substr(1)}, /*conditional=*/false};
        return insn;
    }
    if (starts_with(m, "if-")) {
        if (op.operands.empty()) throw MalformedSmali(lineno, "if without operands");
        const std::string& last = op.operands.back();
        if (last.empty() || last[0] != ':')
            throw MalformedSmali(lineno, "if target must be a label");
        insn.op = BranchInsn{{last.substr(1)}, /*conditional=*/true};
        return insn;
    }
    insn.op = OtherInsn{line};
    return insn;
}

// Block directives whose bodies are data, not opcodes.
bool is_block_directive_start(const std::string& line, std::string& end_token) {
    static const std::pair<const char*, const char*> kBlocks[] = {
        {".annotation", ".end annotation"},
        {".packed-switch", ".end packed-switch"},
        {".sparse-switch", ".end sparse-switch"},
        {".array-data", ".end array-data"},
    };
    for (auto& [start, end] : kBlocks) {
        if (starts_with(line, start)) {
            end_token = end;
            return true;
        }
    }
    return false;
}

}  // namespace

SmaliClass parse_smali_file(const std::string& text) {
    SmaliClass cls;
    bool saw_class = false;
    bool in_method = false;
    SmaliMethod cur;
    std::string block_end;  // non-empty while skipping a data block

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        // strip trailing comments only when the line IS a comment; smali
        // string literals may contain '#', so no inline comment stripping
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (!block_end.empty()) {
            if (starts_with(line, block_end)) block_end.clear();
            continue;
        }
        if (line[0] == '.') {
            if (starts_with(line, ".class")) {
                auto toks = split_ws(line);
                if (toks.size() < 2) throw MalformedSmali(lineno, ".class without name");
                cls.name = descriptor_to_dotted(toks.back());
                for (size_t i = 1; i + 1 < toks.size(); ++i) cls.access_flags.insert(toks[i]);
                saw_class = true;
                continue;
            }
            if (starts_with(line, ".super")) {
                auto toks = split_ws(line);
                if (toks.size() == 2) cls.superclass = descriptor_to_dotted(toks[1]);
                continue;
            }
            if (starts_with(line, ".implements")) {
                auto toks = split_ws(line);
                if (toks.size() == 2) cls.interfaces.push_back(descriptor_to_dotted(toks[1]));
                continue;
            }
            if (starts_with(line, ".method")) {
                if (in_method) throw MalformedSmali(lineno, ".method inside .method");
                if (!saw_class) throw MalformedSmali(lineno, ".method before .class");
                auto toks = split_ws(line);
                if (toks.size() < 2) throw MalformedSmali(lineno, ".method without signature");
                cur = SmaliMethod{};
                const std::string& proto = toks.back();
                size_t lparen = proto.find('(');
                size_t rparen = proto.rfind(')');
                if (lparen == std::string::npos || rparen == std::string::npos || rparen < lparen)
                    throw MalformedSmali(lineno, "bad method prototype '" + proto + "'");
                cur.signature.class_name = cls.name;
                cur.signature.method_name = proto.substr(0, lparen);
                try {
                    cur.signature.param_descriptors =
                        parse_param_descriptors(std::string_view(proto).substr(lparen + 1, rparen - lparen - 1));
                } catch (const std::invalid_argument& e) {
                    throw MalformedSmali(lineno, std::string("bad parameter list: ") + e.what());
                }
                cur.signature.return_descriptor = proto.substr(rparen + 1);
                if (cur.signature.return_descriptor.empty())
                    throw MalformedSmali(lineno, "missing return descriptor");
                for (size_t i = 1; i + 1 < toks.size(); ++i) cur.access_flags.insert(toks[i]);
                in_method = true;
                continue;
            }
            if (starts_with(line, ".end method")) {
                if (!in_method) throw MalformedSmali(lineno, ".end method without .method");
                // ensure register_count covers every referenced register
                int max_v = -1;
                for (const auto& insn : cur.instructions) {
                    auto consider = [&](const std::string& r) {
                        if (r.size() > 1 && r[0] == 'v')
                            if (auto n = parse_int_literal(r.substr(1)))
                                max_v = std::max<std::int64_t>(max_v, *n);
                    };
                    std::visit(
                        [&](const auto& o) {
                            using T = std::decay_t<decltype(o)>;
                            if constexpr (std::is_same_v<T, ConstInsn>) consider(o.reg);
                            else if constexpr (std::is_same_v<T, ConstStringInsn>) consider(o.reg);
                            else if constexpr (std::is_same_v<T, ConstWideInsn>) consider(o.reg);
                            else if constexpr (std::is_same_v<T, MoveInsn>) {
                                consider(o.dst);
                                consider(o.src);
                            } else if constexpr (std::is_same_v<T, MoveResultInsn>) consider(o.reg);
                            else if constexpr (std::is_same_v<T, NewInstanceInsn>) consider(o.reg);
                            else if constexpr (std::is_same_v<T, InvokeInsn>) {
                                for (const auto& r : o.arg_regs) consider(r);
                            } else if constexpr (std::is_same_v<T, ArrayPutInsn>) {
                                consider(o.value_reg);
                                consider(o.array_reg);
                                consider(o.index_reg);
                            } else if constexpr (std::is_same_v<T, FilledNewArrayInsn>) {
                                for (const auto& r : o.element_regs) consider(r);
                            } else if constexpr (std::is_same_v<T, StaticGetInsn>) consider(o.reg);
                        },
                        insn.op);
                }
                cur.register_count = std::max(cur.register_count, max_v + 1);
                cls.methods.push_back(std::move(cur));
                in_method = false;
                continue;
            }
            if (in_method && (starts_with(line, ".registers") || starts_with(line, ".locals"))) {
                auto toks = split_ws(line);
                if (toks.size() == 2)
                    if (auto n = parse_int_literal(toks[1]))
                        cur.register_count = std::max<std::int64_t>(cur.register_count, *n);
                continue;
            }
            if (is_block_directive_start(line, block_end)) continue;
            // .field, .source, .line, .param, .local, .catch, ... are directives
            continue;
        }
        if (!in_method) continue;  // stray text outside methods tolerated
        cur.instructions.push_back(parse_instruction(line, lineno));
    }
    if (!saw_class) throw MalformedSmali(0, "missing .class directive");
    if (in_method) throw MalformedSmali(lineno, "unbalanced .method/.end method");
    return cls;
}

std::vector<std::filesystem::path> smali_dirs(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::vector<fs::path> dirs;
    if (!fs::exists(root)) return dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && starts_with(entry.path().filename().string(), "smali"))
            dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
        return natural_less(a.filename().string(), b.filename().string());
    });
    return dirs;
}

std::vector<std::filesystem::path> smali_files(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& dir : smali_dirs(root)) {
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".smali")
                files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    return files;
}

AppIR parse_app_dir(const std::filesystem::path& root, const std::string& app_id) {
    AppIR app;
    app.app_id = app_id;
    auto files = smali_files(root);
    for (const auto& file : files) {
        ++app.file_count;
        std::string text;
        try {
            text = read_file(file);
        } catch (const std::exception& e) {
            app.warnings.push_back("unreadable file " + file.string() + ": " + e.what());
            continue;
        }
        try {
            SmaliClass cls = parse_smali_file(text);
            auto [it, inserted] = app.classes.emplace(cls.name, std::move(cls));
            if (!inserted)
                app.warnings.push_back("duplicate class " + it->first + " in " + file.string() +
                                       ", keeping first occurrence");
        } catch (const MalformedSmali& e) {
            app.warnings.push_back("parse failure in " + file.string() + ": " + e.what());
        }
    }
    if (app.classes.empty())
        throw EmptyApp("no classes parsed under " + root.string() + " for app " + app_id);
    return app;
}

}  // namespace keyscan
