#include "rumtest/revpref.hpp"

#include <deque>

#include "rumtest/errors.hpp"

namespace rumtest {
namespace {

// Reachability from src to dst along edges of any strength.
bool reachable(const PrefGraph& g, int src, int dst) {
  std::vector<char> seen(g.n, 0);
  std::deque<int> queue{src};
  seen[src] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == dst) return true;
    for (int v = 0; v < g.n; ++v) {
      if (g.adjacency[u][v] && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return false;
}

bool acyclic(const PrefGraph& g) {
  // 0 unvisited, 1 on stack, 2 done.
  std::vector<char> color(g.n, 0);
  std::vector<int> stack, next;
  for (int s = 0; s < g.n; ++s) {
    if (color[s]) continue;
    stack.assign(1, s);
    next.assign(1, 0);
    color[s] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      int it = next.back();
      bool descended = false;
      for (; it < g.n; ++it) {
        if (!g.adjacency[u][it]) continue;
        if (color[it] == 1) return false;
        if (color[it] == 0) {
          // Record the resume point before growing the stack: push_back
          // may reallocate.
          next.back() = it + 1;
          color[it] = 1;
          stack.push_back(it);
          next.push_back(0);
          descended = true;
          break;
        }
      }
      if (!descended) {
        color[u] = 2;
        stack.pop_back();
        next.pop_back();
      }
    }
  }
  return true;
}

}  // namespace

PrefGraph build_pref_graph(const std::vector<int>& choices, const PatchTable& t) {
  const int m = static_cast<int>(choices.size());
  PrefGraph g;
  g.n = m;
  g.adjacency.assign(m, std::vector<int>(m, 0));
  for (int k = 0; k < m; ++k) {
    const int idx = choices[k];
    if (idx < 0) continue;
    if (idx >= t.total() || t.patches[idx].budget != k) {
      throw ValidationError("choice " + std::to_string(k) +
                            " is not a patch of budget " + std::to_string(k));
    }
    const Eigen::VectorXi& sign = t.patches[idx].sign;
    for (int j = 0; j < m; ++j) {
      if (j == k || choices[j] < 0) continue;
      if (sign(j) < 0) g.adjacency[j][k] = 2;
      else if (sign(j) == 0) g.adjacency[j][k] = 1;
    }
  }
  return g;
}

std::vector<Edge> revealed_edges(const std::vector<int>& choices,
                                 const PatchTable& t) {
  PrefGraph g = build_pref_graph(choices, t);
  std::vector<Edge> edges;
  for (int j = 0; j < g.n; ++j) {
    for (int k = 0; k < g.n; ++k) {
      if (g.adjacency[j][k]) {
        edges.push_back({j, k, g.adjacency[j][k] == 2});
      }
    }
  }
  return edges;
}

bool consistent(const PrefGraph& g, Axiom axiom) {
  if (axiom == Axiom::Sarp) return acyclic(g);
  // Garp: no cycle may contain a strict edge, i.e. no strict edge u -> v
  // with v able to reach u.
  for (int u = 0; u < g.n; ++u) {
    for (int v = 0; v < g.n; ++v) {
      if (g.adjacency[u][v] == 2 && reachable(g, v, u)) return false;
    }
  }
  return true;
}

bool consistent_fw(const PrefGraph& g, Axiom axiom) {
  const int n = g.n;
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) reach[i][j] = g.adjacency[i][j] ? 1 : 0;
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (int j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = 1;
      }
    }
  }
  if (axiom == Axiom::Sarp) {
    for (int i = 0; i < n; ++i) {
      if (reach[i][i]) return false;
    }
    return true;
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (g.adjacency[u][v] == 2 && reach[v][u]) return false;
    }
  }
  return true;
}

bool partial_consistent(const std::vector<int>& choices, const PatchTable& t,
                        Axiom axiom) {
  return consistent(build_pref_graph(choices, t), axiom);
}

bool rationalizable(const std::vector<int>& choices, const PatchTable& t,
                    Axiom axiom) {
  if (static_cast<int>(choices.size()) != t.num_budgets()) {
    throw ValidationError("pattern length differs from budget count");
  }
  for (int j = 0; j < t.num_budgets(); ++j) {
    if (choices[j] < 0) throw ValidationError("incomplete pattern");
  }
  return consistent(build_pref_graph(choices, t), axiom);
}

}  // namespace rumtest
