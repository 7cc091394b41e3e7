#ifndef KEYSCAN_CALLGRAPH_HPP
#define KEYSCAN_CALLGRAPH_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "keyscan/party.hpp"
#include "keyscan/smali_ir.hpp"

namespace keyscan {

struct UnknownMethod : std::runtime_error {
    explicit UnknownMethod(const std::string& sig)
        : std::runtime_error("method not in call graph: " + sig) {}
};

// Immutable after finalize(); nodes are method signatures, edges derive only
// from Invoke instructions. External callees become stub nodes with no
// outgoing edges.
class CallGraph {
public:
    int add_node(const MethodSignature& sig);
    void add_edge(const MethodSignature& caller, const MethodSignature& callee);
    // Sorts adjacency lists; queries below require it.
    void finalize();

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const MethodSignature& node(int id) const { return nodes_[id]; }
    int find(const MethodSignature& sig) const;  // -1 when absent
    const std::vector<int>& callees_of(int id) const { return forward_[id]; }
    const std::vector<int>& callers_of(int id) const { return reverse_[id]; }

private:
    std::vector<MethodSignature> nodes_;
    std::map<MethodSignature, int> ids_;
    std::vector<std::vector<int>> forward_;
    std::vector<std::vector<int>> reverse_;
    bool finalized_ = false;
};

struct ReachabilityResult {
    std::string callsite_id;
    bool reachable = false;
    std::vector<MethodSignature> evidence_path;  // first-party -> containing
    int visited_count = 0;
    bool truncated = false;
};

// Every Invoke adds caller -> declared target. With cha, virtual/interface
// invokes also gain edges to every override defined in subclasses present in
// the app.
CallGraph build_call_graph(const AppIR& app, bool cha);

inline constexpr int kDefaultNodeLimit = 1000;

// Backward BFS over reverse edges from the containing method, visiting at
// most node_limit nodes (lexicographic tie-break). Reachable iff a visited
// method's package is classified first-party; obfuscated and unclassified
// packages are traversed but never satisfy.
ReachabilityResult backward_reachability(const CallGraph& graph,
                                         const MethodSignature& containing_method,
                                         const PartyMap& party_map,
                                         int node_limit = kDefaultNodeLimit);

}  // namespace keyscan

#endif
