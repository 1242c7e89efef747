#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "covreg/history.hpp"

namespace covreg {

/// Outcome of one property check. A failing verdict always carries the
/// offending event subset.
struct Verdict {
  std::string property;
  bool pass = false;
  std::string detail;
  History counterexample;
};

/// Rooted tree over produced versions: one parent edge per chg write.
struct VersionTree {
  std::set<Tag> nodes;
  std::map<Tag, Tag> parent;                 // no entry for the root
  std::map<Tag, std::vector<Tag>> children;  // sorted by tag
  std::map<Tag, std::size_t> depth;

  bool is_path() const;
};

/// Builds the version tree of a history. Requires validity; throws
/// MalformedHistory when the produced versions do not form a tree.
VersionTree build_version_tree(const History& h);

Verdict check_validity(const History& h);
Verdict check_consolidation(const History& h);
Verdict check_continuity(const History& h);
Verdict check_evolution(const History& h);
Verdict check_atomicity(const History& h);
/// Strong coverability: path-shaped version tree, one chg write per revised
/// version, real-time order of chg writes consistent with tag order.
Verdict check_strong(const History& h);

/// Independent oracle: enumerates every real-time-respecting total order of
/// the (at most 8) register operations and replays each sequentially.
Verdict brute_force_linearizable(const History& h);

/// Runs a named property ("atomicity", "validity", "consolidation",
/// "continuity", "evolution", "strong").
Verdict check_property(const std::string& name, const History& h);

/// All weak-coverability acceptance properties, in a fixed order.
std::vector<Verdict> check_all(const History& h, bool include_strong = false);

/// Greedy counterexample shrinking: drops operations while the property
/// still fails. Best effort, not guaranteed minimal.
History minimize_counterexample(const History& h, const std::string& property);

}  // namespace covreg
