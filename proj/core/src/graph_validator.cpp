#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lector/reasoning_graph.hpp"

namespace lector {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

std::string edge_location(const GraphEdge& e) {
  return "edge " + e.src + "->" + e.dst + " [" + std::string(to_string(e.kind)) + "]";
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

/// Strongly connected components with more than one member (Tarjan).
std::vector<std::vector<std::size_t>> nontrivial_sccs(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  // Iterative DFS: frame = (node, next child position).
  for (std::size_t start = 0; start < n; ++start) {
    if (index[start] != kUnvisited) continue;
    std::vector<std::pair<std::size_t, std::size_t>> frames{{start, 0}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adj[v].size()) {
        std::size_t w = adj[v][pos++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        if (component.size() > 1) out.push_back(std::move(component));
      }
      std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return out;
}

}  // namespace

ValidationReport validate(const ReasoningGraph& graph) {
  std::vector<Diagnostic> diags;
  auto add = [&](DiagnosticCode code, std::string location, std::string message) {
    diags.push_back({code, Severity::kError, std::move(message), std::move(location)});
  };

  // Nodes, keyed by first occurrence of each id.
  std::map<std::string, std::size_t, std::less<>> index_of;
  std::vector<const GraphNode*> nodes;
  for (const auto& n : graph.nodes) {
    if (index_of.contains(n.id)) {
      add(DiagnosticCode::kDupNode, "node " + n.id, "node id '" + n.id + "' is declared more than once");
      continue;
    }
    index_of.emplace(n.id, nodes.size());
    nodes.push_back(&n);
  }
  for (const GraphNode* n : nodes) {
    if (blank(n->transcription)) {
      add(DiagnosticCode::kEmptyTranscription, "node " + n->id, "node '" + n->id + "' has an empty transcription");
    }
  }
  if (nodes.size() > kMaxGraphNodes) {
    add(DiagnosticCode::kMaxNodes, "graph",
        "graph has " + std::to_string(nodes.size()) + " nodes; at most " + std::to_string(kMaxGraphNodes) +
            " are allowed");
  }

  // Edges that can take part in structural checks.
  std::vector<const GraphEdge*> edges;
  for (const auto& e : graph.edges) {
    if (e.src == e.dst) {
      add(DiagnosticCode::kSelfLoop, edge_location(e), "edge from '" + e.src + "' to itself");
      continue;
    }
    std::vector<std::string> missing;
    if (!index_of.contains(e.src)) missing.push_back(e.src);
    if (!index_of.contains(e.dst) && e.dst != e.src) missing.push_back(e.dst);
    if (!missing.empty()) {
      add(DiagnosticCode::kDanglingEdge, edge_location(e), "edge references undeclared node(s): " + join(missing));
      continue;
    }
    edges.push_back(&e);
  }

  const std::size_t n = nodes.size();
  std::vector<std::vector<const GraphEdge*>> incoming(n);
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::size_t> out_degree(n, 0);
  for (const GraphEdge* e : edges) {
    std::size_t s = index_of.find(e->src)->second;
    std::size_t d = index_of.find(e->dst)->second;
    incoming[d].push_back(e);
    adj[s].push_back(d);
    ++out_degree[s];
  }

  // Pairing rule.
  for (std::size_t v = 0; v < n; ++v) {
    const auto& in = incoming[v];
    const std::string& id = nodes[v]->id;
    if (in.empty()) continue;
    std::set<std::tuple<std::string_view, EdgeKind>> seen;
    bool duplicate = false;
    for (const GraphEdge* e : in) duplicate |= !seen.emplace(e->src, e->kind).second;
    if (duplicate) {
      add(DiagnosticCode::kBadIndegree, "node " + id, "node '" + id + "' has duplicate incoming edges");
      continue;
    }
    if (in.size() != 2) {
      add(DiagnosticCode::kBadIndegree, "node " + id,
          "node '" + id + "' has " + std::to_string(in.size()) + " incoming edges; a conclusion needs exactly 2");
      continue;
    }
    if (in[0]->src == in[1]->src) {
      add(DiagnosticCode::kBadPair, "node " + id, "both premises of '" + id + "' come from '" + in[0]->src + "'");
    } else if (!forms_pair(in[0]->kind, in[1]->kind)) {
      add(DiagnosticCode::kBadPair, "node " + id,
          "incoming kinds of '" + id + "' (" + std::string(to_string(in[0]->kind)) + ", " +
              std::string(to_string(in[1]->kind)) + ") do not form a paradigm pair");
    }
  }

  // Acyclicity.
  for (auto& component : nontrivial_sccs(adj)) {
    std::vector<std::string> ids;
    for (std::size_t v : component) ids.push_back(nodes[v]->id);
    std::sort(ids.begin(), ids.end());
    add(DiagnosticCode::kCycle, "node " + ids.front(), "directed cycle through " + join(ids));
  }

  // Single root: exactly one sink that has premises.
  std::vector<std::size_t> roots;
  for (std::size_t v = 0; v < n; ++v) {
    if (out_degree[v] == 0 && !incoming[v].empty()) roots.push_back(v);
  }
  if (roots.empty()) {
    add(DiagnosticCode::kNoRoot, "graph", "no node with incoming edges only");
  } else if (roots.size() > 1) {
    std::vector<std::string> ids;
    for (std::size_t v : roots) ids.push_back(nodes[v]->id);
    std::sort(ids.begin(), ids.end());
    add(DiagnosticCode::kMultiRoot, "graph", "multiple root candidates: " + join(ids));
  }

  // Weak connectivity.
  if (n > 1) {
    DisjointSets sets(n);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t w : adj[v]) sets.unite(v, w);
    }
    std::map<std::size_t, std::vector<std::size_t>> components;  // rep -> members in node order
    for (std::size_t v = 0; v < n; ++v) components[sets.find(v)].push_back(v);
    if (components.size() > 1) {
      std::size_t main_rep;
      if (roots.size() == 1) {
        main_rep = sets.find(roots.front());
      } else {
        // Largest component; ties go to the one declared first.
        auto best = std::max_element(components.begin(), components.end(), [](const auto& a, const auto& b) {
          if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
          return a.second.front() > b.second.front();
        });
        main_rep = best->first;
      }
      for (const auto& [rep, members] : components) {
        if (rep == main_rep) continue;
        std::vector<std::string> ids;
        for (std::size_t v : members) ids.push_back(nodes[v]->id);
        add(DiagnosticCode::kDisconnected, "node " + ids.front(),
            members.size() == 1 ? "node '" + ids.front() + "' is isolated from the main graph"
                                : "nodes " + join(ids) + " are disconnected from the main graph");
      }
    }
  }

  sort_diagnostics(diags);
  return ValidationReport{std::move(diags)};
}

}  // namespace lector
