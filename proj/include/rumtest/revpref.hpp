#ifndef RUMTEST_REVPREF_HPP
#define RUMTEST_REVPREF_HPP

#include <Eigen/Dense>
#include <vector>

#include "rumtest/geometry.hpp"

namespace rumtest {

enum class Axiom { Sarp, Garp };

/// Directed revealed-preference relations induced by at most one chosen
/// patch per budget. Edge j -> k iff budget k's chosen patch lies weakly
/// below budget j; strict iff strictly below. No self-edges.
struct PrefGraph {
  int n = 0;
  // adjacency[j][k]: 0 none, 1 weak (on the plane), 2 strict.
  std::vector<std::vector<int>> adjacency;
};

/// Build the relation graph for a (possibly partial) pattern. choices has
/// one entry per budget: the stacked patch index chosen there, or -1 when
/// that budget is unassigned. Unassigned budgets are isolated nodes.
PrefGraph build_pref_graph(const std::vector<int>& choices, const PatchTable& t);

/// Edge list form of the graph, each edge tagged strict or weak.
struct Edge {
  int from = 0;
  int to = 0;
  bool strict = false;
};
std::vector<Edge> revealed_edges(const std::vector<int>& choices,
                                 const PatchTable& t);

/// A pattern is consistent iff the relation graph has no offending cycle.
/// Sarp forbids any cycle; Garp forbids cycles containing a strict edge.
/// Depth-first implementation (the default) and a Floyd-Warshall
/// transitive-closure implementation for cross-validation.
bool consistent(const PrefGraph& g, Axiom axiom);
bool consistent_fw(const PrefGraph& g, Axiom axiom);

/// Consistency of a partial pattern. A partial pattern that fails here has
/// no consistent completion (removing budgets cannot create cycles).
bool partial_consistent(const std::vector<int>& choices, const PatchTable& t,
                        Axiom axiom);

/// Complete-pattern check: every budget must be assigned.
bool rationalizable(const std::vector<int>& choices, const PatchTable& t,
                    Axiom axiom);

}  // namespace rumtest

#endif
