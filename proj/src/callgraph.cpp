#include "keyscan/callgraph.hpp"

#include <algorithm>
#include <queue>

#include "keyscan/sigdb.hpp"

namespace keyscan {

std::string to_string(Party p) {
    switch (p) {
        case Party::First: return "first";
        case Party::Third: return "third";
        case Party::ExcludedObfuscated: return "excluded-obfuscated";
        case Party::Withheld: return "withheld";
    }
    return "withheld";
}

Party party_from_string(const std::string& s) {
    if (s == "first") return Party::First;
    if (s == "third") return Party::Third;
    if (s == "excluded-obfuscated") return Party::ExcludedObfuscated;
    if (s == "withheld") return Party::Withheld;
    throw std::invalid_argument("unknown party: " + s);
}

int CallGraph::add_node(const MethodSignature& sig) {
    auto it = ids_.find(sig);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(sig);
    ids_[sig] = id;
    forward_.emplace_back();
    reverse_.emplace_back();
    return id;
}

void CallGraph::add_edge(const MethodSignature& caller, const MethodSignature& callee) {
    int u = add_node(caller);
    int v = add_node(callee);
    forward_[u].push_back(v);
    reverse_[v].push_back(u);
}

void CallGraph::finalize() {
    auto by_signature = [this](int a, int b) { return nodes_[a] < nodes_[b]; };
    for (auto& adj : forward_) {
        std::sort(adj.begin(), adj.end(), by_signature);
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    for (auto& adj : reverse_) {
        std::sort(adj.begin(), adj.end(), by_signature);
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    finalized_ = true;
}

int CallGraph::find(const MethodSignature& sig) const {
    auto it = ids_.find(sig);
    return it == ids_.end() ? -1 : it->second;
}

namespace {

// Transitive subclass test over superclass chains and interface lists known
// to the app.
bool derives_from(const AppIR& app, const std::string& cls, const std::string& ancestor) {
    std::set<std::string> seen;
    std::vector<std::string> work{cls};
    while (!work.empty()) {
        std::string cur = work.back();
        work.pop_back();
        if (!seen.insert(cur).second) continue;
        auto it = app.classes.find(cur);
        if (it == app.classes.end()) continue;
        if (!it->second.superclass.empty()) {
            if (it->second.superclass == ancestor) return true;
            work.push_back(it->second.superclass);
        }
        for (const auto& iface : it->second.interfaces) {
            if (iface == ancestor) return true;
            work.push_back(iface);
        }
    }
    return false;
}

}  // namespace

CallGraph build_call_graph(const AppIR& app, bool cha) {
    CallGraph g;
    for (const auto& [name, cls] : app.classes)
        for (const auto& m : cls.methods) g.add_node(m.signature);

    for (const auto& [name, cls] : app.classes) {
        for (const auto& m : cls.methods) {
            for (const auto& insn : m.instructions) {
                const auto* inv = insn.as<InvokeInsn>();
                if (!inv) continue;
                g.add_edge(m.signature, inv->target);
                if (cha && (inv->kind == InvokeKind::Virtual ||
                            inv->kind == InvokeKind::Interface)) {
                    for (const auto& [sub_name, sub] : app.classes) {
                        if (sub_name == inv->target.class_name) continue;
                        if (!derives_from(app, sub_name, inv->target.class_name)) continue;
                        for (const auto& sm : sub.methods) {
                            if (sm.signature.method_name == inv->target.method_name &&
                                sm.signature.param_descriptors ==
                                    inv->target.param_descriptors &&
                                sm.signature.return_descriptor == inv->target.return_descriptor)
                                g.add_edge(m.signature, sm.signature);
                        }
                    }
                }
            }
        }
    }
    g.finalize();
    return g;
}

ReachabilityResult backward_reachability(const CallGraph& graph,
                                         const MethodSignature& containing_method,
                                         const PartyMap& party_map, int node_limit) {
    int start = graph.find(containing_method);
    if (start < 0) throw UnknownMethod(containing_method.to_string());
    if (node_limit < 1) node_limit = 1;

    ReachabilityResult result;
    auto is_first_party = [&](int id) {
        auto it = party_map.find(package_of(graph.node(id).class_name));
        return it != party_map.end() && it->second == Party::First;
    };

    std::vector<int> predecessor(graph.node_count(), -1);
    std::vector<char> discovered(graph.node_count(), 0);
    std::queue<int> frontier;
    frontier.push(start);
    discovered[start] = 1;

    int found = -1;
    while (!frontier.empty() && result.visited_count < node_limit) {
        int cur = frontier.front();
        frontier.pop();
        ++result.visited_count;
        if (is_first_party(cur)) {
            found = cur;
            break;
        }
        for (int caller : graph.callers_of(cur)) {  // pre-sorted lexicographically
            if (!discovered[caller]) {
                discovered[caller] = 1;
                predecessor[caller] = cur;
                frontier.push(caller);
            }
        }
    }
    result.truncated = found < 0 && !frontier.empty();
    result.reachable = found >= 0;
    if (found >= 0) {
        for (int cur = found; cur != -1; cur = predecessor[cur])
            result.evidence_path.push_back(graph.node(cur));
    }
    return result;
}

}  // namespace keyscan
