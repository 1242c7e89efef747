#include "covreg/checker.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace covreg {
namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

// A register-level operation after invoke/respond pairing. Successful (chg)
// writes are "writes"; reads and unchg writes are "reads" (they only report
// the pair they observed).
struct RegOp {
  bool is_write = false;
  Tag tag;     // produced (write) or observed (read)
  Value val;
  Tag target;  // writes only: the version the write revised
  std::uint64_t inv = 0;
  std::uint64_t res = kNever;  // kNever: pending (synthesized completion)
  std::uint64_t op_id = 0;
  ProcessId proc = kReservedPid;
  bool synthesized = false;

  bool precedes(const RegOp& o) const { return res != kNever && res < o.inv; }
};

struct RegHistory {
  std::vector<RegOp> writes;
  std::vector<RegOp> reads;

  std::vector<const RegOp*> all() const {
    std::vector<const RegOp*> v;
    v.reserve(writes.size() + reads.size());
    for (const auto& w : writes) v.push_back(&w);
    for (const auto& r : reads) v.push_back(&r);
    return v;
  }
};

// Extracts register operations. Pending (crash-truncated) operations are
// handled the standard way: a pending write whose pair some read observed
// must have taken effect and is completed with an open-ended interval; all
// other pending operations are dropped.
RegHistory extract_register_ops(const History& h) {
  auto records = pair_operations(h);
  RegHistory out;
  std::vector<const OpRecord*> pending_writes;
  for (const auto& r : records) {
    if (r.type != OpType::cvr_write && r.type != OpType::cvr_read) continue;
    if (!r.complete()) {
      if (r.type == OpType::cvr_write) pending_writes.push_back(&r);
      continue;
    }
    RegOp op;
    op.inv = r.invoke_seq;
    op.res = *r.respond_seq;
    op.op_id = r.op_id;
    op.proc = r.proc;
    op.tag = r.returned_tag();
    op.val = r.returned_value();
    if (r.type == OpType::cvr_write && r.is_chg_write()) {
      op.is_write = true;
      op.target = r.write_target();
      out.writes.push_back(std::move(op));
    } else {
      out.reads.push_back(std::move(op));
    }
  }
  // Resurrect pending writes whose pair was observed.
  std::set<Tag> produced;
  for (const auto& w : out.writes) produced.insert(w.tag);
  std::set<const OpRecord*> used;
  for (const auto& r : out.reads) {
    if (r.tag == kTag0 || produced.count(r.tag)) continue;
    for (const OpRecord* p : pending_writes) {
      if (used.count(p)) continue;
      Value pv = from_hex(p->args.at("val").get<std::string>());
      if (pv != r.val) continue;
      RegOp w;
      w.is_write = true;
      w.tag = r.tag;
      w.val = pv;
      w.target = tag_from_json(p->args.at("ver"));
      w.inv = p->invoke_seq;
      w.res = kNever;
      w.op_id = p->op_id;
      w.proc = p->proc;
      w.synthesized = true;
      out.writes.push_back(std::move(w));
      produced.insert(r.tag);
      used.insert(p);
      break;
    }
  }
  std::sort(out.writes.begin(), out.writes.end(),
            [](const RegOp& a, const RegOp& b) { return a.tag < b.tag; });
  return out;
}

History events_of(const History& h, const std::set<std::uint64_t>& op_ids) {
  History out;
  for (const auto& e : h)
    if (op_ids.count(e.op_id)) out.push_back(e);
  return out;
}

Verdict fail(const History& h, std::string property, std::string detail,
             std::initializer_list<const RegOp*> ops) {
  std::set<std::uint64_t> ids;
  for (const RegOp* o : ops) ids.insert(o->op_id);
  return Verdict{std::move(property), false, std::move(detail), events_of(h, ids)};
}

Verdict pass(std::string property) {
  return Verdict{std::move(property), true, "", {}};
}

Verdict validity_impl(const History& h, const RegHistory& reg,
                      const std::string& property) {
  for (const auto& w : reg.writes)
    if (!(w.target < w.tag))
      return fail(h, property,
                  "chg write produced tag " + to_string(w.tag) +
                      " not larger than the version it revised " +
                      to_string(w.target),
                  {&w});
  for (std::size_t i = 0; i + 1 < reg.writes.size(); ++i)
    if (reg.writes[i].tag == reg.writes[i + 1].tag)
      return fail(h, property,
                  "two chg writes produced the same tag " +
                      to_string(reg.writes[i].tag),
                  {&reg.writes[i], &reg.writes[i + 1]});
  std::set<Tag> produced{kTag0};
  for (const auto& w : reg.writes) produced.insert(w.tag);
  for (const auto& w : reg.writes)
    if (!produced.count(w.target))
      return fail(h, property,
                  "tag " + to_string(w.tag) + " revises " + to_string(w.target) +
                      " which no chg write produced (no chain to the initial version)",
                  {&w});
  return pass(property);
}

}  // namespace

Verdict check_validity(const History& h) {
  return validity_impl(h, extract_register_ops(h), "validity");
}

Verdict check_consolidation(const History& h) {
  RegHistory reg = extract_register_ops(h);
  for (const auto& w1 : reg.writes) {
    for (const auto& w2 : reg.writes) {
      if (!w1.precedes(w2)) continue;
      if (!(w1.tag <= w2.target) || !(w1.tag < w2.tag))
        return fail(h, "consolidation",
                    "write producing " + to_string(w1.tag) +
                        " completed before a write revising " +
                        to_string(w2.target) + " (producing " + to_string(w2.tag) +
                        ") was invoked",
                    {&w1, &w2});
    }
  }
  return pass("consolidation");
}

Verdict check_continuity(const History& h) {
  RegHistory reg = extract_register_ops(h);
  for (const auto& w : reg.writes) {
    if (w.target == kTag0) continue;
    const RegOp* producer = nullptr;
    for (const auto& p : reg.writes)
      if (p.tag == w.target) producer = &p;
    if (producer == nullptr)
      return fail(h, "continuity",
                  "write revising " + to_string(w.target) +
                      " has no chg write producing that version",
                  {&w});
    if (!(producer->tag < w.tag))
      return fail(h, "continuity",
                  "write revising " + to_string(w.target) +
                      " is not tag-ordered after its producer",
                  {producer, &w});
  }
  return pass("continuity");
}

VersionTree build_version_tree(const History& h) {
  RegHistory reg = extract_register_ops(h);
  if (auto v = validity_impl(h, reg, "validity"); !v.pass)
    throw MalformedHistory("history is not valid: " + v.detail);
  VersionTree t;
  t.nodes.insert(kTag0);
  for (const auto& w : reg.writes) {
    t.nodes.insert(w.tag);
    t.parent[w.tag] = w.target;
    t.children[w.target].push_back(w.tag);
  }
  for (auto& [p, kids] : t.children) std::sort(kids.begin(), kids.end());
  // Depths; validity guarantees every chain reaches the root.
  std::function<std::size_t(const Tag&)> depth_of = [&](const Tag& n) -> std::size_t {
    if (auto it = t.depth.find(n); it != t.depth.end()) return it->second;
    std::size_t d = n == kTag0 ? 0 : depth_of(t.parent.at(n)) + 1;
    t.depth[n] = d;
    return d;
  };
  for (const auto& n : t.nodes) depth_of(n);
  return t;
}

bool VersionTree::is_path() const {
  for (const auto& [p, kids] : children)
    if (kids.size() > 1) return false;
  return true;
}

Verdict check_evolution(const History& h) {
  RegHistory reg = extract_register_ops(h);
  if (auto v = validity_impl(h, reg, "evolution"); !v.pass) {
    v.detail = "validity precondition failed: " + v.detail;
    return v;
  }
  VersionTree t = build_version_tree(h);
  // Nodes at strictly smaller depth must carry strictly smaller tags.
  std::map<std::size_t, std::pair<Tag, Tag>> extremes;  // depth -> (min, max)
  for (const auto& [n, d] : t.depth) {
    auto it = extremes.find(d);
    if (it == extremes.end())
      extremes[d] = {n, n};
    else {
      it->second.first = std::min(it->second.first, n);
      it->second.second = std::max(it->second.second, n);
    }
  }
  Tag running_max = kTag0;
  bool have_prev = false;
  std::size_t prev_depth = 0;
  for (const auto& [d, mm] : extremes) {
    if (have_prev && !(running_max < mm.first)) {
      // Find concrete witnesses for the counterexample.
      const RegOp *shallow = nullptr, *deep = nullptr;
      for (const auto& w : reg.writes) {
        if (t.depth.at(w.tag) < d && w.tag == running_max) shallow = &w;
        if (t.depth.at(w.tag) == d && w.tag == mm.first) deep = &w;
      }
      std::set<std::uint64_t> ids;
      if (shallow) ids.insert(shallow->op_id);
      if (deep) ids.insert(deep->op_id);
      return Verdict{"evolution", false,
                     "version " + to_string(mm.first) + " at depth " +
                         std::to_string(d) + " is not larger than " +
                         to_string(running_max) + " at depth " +
                         std::to_string(prev_depth),
                     events_of(h, ids)};
    }
    running_max = std::max(running_max, mm.second);
    prev_depth = d;
    have_prev = true;
  }
  return pass("evolution");
}

Verdict check_strong(const History& h) {
  RegHistory reg = extract_register_ops(h);
  if (auto v = validity_impl(h, reg, "strong"); !v.pass) {
    v.detail = "validity precondition failed: " + v.detail;
    return v;
  }
  VersionTree t = build_version_tree(h);
  for (const auto& [p, kids] : t.children) {
    if (kids.size() > 1) {
      const RegOp *a = nullptr, *b = nullptr;
      for (const auto& w : reg.writes) {
        if (w.tag == kids[0]) a = &w;
        if (w.tag == kids[1]) b = &w;
      }
      return fail(h, "strong",
                  "version " + to_string(p) + " was revised by more than one chg write",
                  {a, b});
    }
  }
  for (const auto& w1 : reg.writes)
    for (const auto& w2 : reg.writes)
      if (w1.precedes(w2) && !(w1.tag < w2.tag))
        return fail(h, "strong",
                    "chg writes out of tag order across real time", {&w1, &w2});
  return pass("strong");
}

namespace {

// Atomicity via write clusters. Each chg write and the reads observing its
// (tag, value) pair must form a contiguous block of the linearization, so a
// linearization exists iff the real-time precedence relation between blocks
// is acyclic. Topological order prefers tag order, which is the order the
// protocols' own A2 witness induces.
Verdict atomicity_impl(const History& h) {
  RegHistory reg = extract_register_ops(h);
  const std::size_t nw = reg.writes.size();
  for (std::size_t i = 0; i + 1 < nw; ++i)
    if (reg.writes[i].tag == reg.writes[i + 1].tag)
      return fail(h, "atomicity", "duplicate chg write tags (validity violation)",
                  {&reg.writes[i], &reg.writes[i + 1]});

  // Cluster 0 is the initial state; cluster i+1 is writes[i] (tag sorted).
  std::map<Tag, std::size_t> cluster_of_tag;
  for (std::size_t i = 0; i < nw; ++i) cluster_of_tag[reg.writes[i].tag] = i + 1;

  const std::size_t nc = nw + 1;
  std::vector<std::vector<const RegOp*>> members(nc);
  for (const auto& w : reg.writes) members[cluster_of_tag.at(w.tag)].push_back(&w);

  const Value* initial_value = nullptr;
  for (const auto& r : reg.reads) {
    if (r.tag == kTag0) {
      if (initial_value == nullptr)
        initial_value = &r.val;
      else if (*initial_value != r.val)
        return fail(h, "atomicity",
                    "two reads of the initial version returned different values",
                    {&r});
      members[0].push_back(&r);
      continue;
    }
    auto it = cluster_of_tag.find(r.tag);
    if (it == cluster_of_tag.end())
      return fail(h, "atomicity",
                  "read returned tag " + to_string(r.tag) + " which no write produced",
                  {&r});
    const RegOp& w = reg.writes[it->second - 1];
    if (w.val != r.val)
      return fail(h, "atomicity",
                  "read returned a value different from the write of tag " +
                      to_string(r.tag),
                  {&w, &r});
    if (r.precedes(w))
      return fail(h, "atomicity",
                  "read of tag " + to_string(r.tag) +
                      " completed before the write producing it was invoked",
                  {&w, &r});
    members[it->second].push_back(&r);
  }

  // Precedence between clusters, with a witness pair per edge.
  std::vector<std::set<std::size_t>> succ(nc);
  std::vector<std::size_t> indeg(nc, 0);
  std::vector<std::pair<const RegOp*, std::size_t>> flat;
  for (std::size_t c = 0; c < nc; ++c)
    for (const RegOp* o : members[c]) flat.emplace_back(o, c);
  for (const auto& [a, ca] : flat) {
    for (const auto& [b, cb] : flat) {
      if (ca == cb || !a->precedes(*b)) continue;
      if (cb == 0)
        return fail(h, "atomicity",
                    "read of the initial version follows a completed operation "
                    "on a later version (new-old inversion)",
                    {a, b});
      if (succ[ca].insert(cb).second) ++indeg[cb];
    }
  }

  // Kahn topological sort, smallest tag first.
  auto cluster_tag = [&](std::size_t c) { return c == 0 ? kTag0 : reg.writes[c - 1].tag; };
  auto cmp = [&](std::size_t a, std::size_t b) { return cluster_tag(a) > cluster_tag(b); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
  for (std::size_t c = 0; c < nc; ++c)
    if (indeg[c] == 0) ready.push(c);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t c = ready.top();
    ready.pop();
    order.push_back(c);
    for (std::size_t s : succ[c])
      if (--indeg[s] == 0) ready.push(s);
  }
  if (order.size() != nc) {
    std::set<std::uint64_t> ids;
    for (std::size_t c = 0; c < nc; ++c)
      if (indeg[c] > 0)
        for (const RegOp* o : members[c]) ids.insert(o->op_id);
    return Verdict{"atomicity", false,
                   "no linearization: cyclic real-time constraints between writes "
                   "and the reads observing them",
                   events_of(h, ids)};
  }

  // Candidate linearization: each cluster's write then its reads by invoke
  // order. Verify A1-A3 by sequential replay.
  std::vector<const RegOp*> seq;
  for (std::size_t c : order) {
    std::vector<const RegOp*> ms = members[c];
    std::sort(ms.begin(), ms.end(), [](const RegOp* a, const RegOp* b) {
      if (a->is_write != b->is_write) return a->is_write;
      return a->inv < b->inv;
    });
    for (const RegOp* o : ms) seq.push_back(o);
  }
  const RegOp* last_write = nullptr;
  for (const RegOp* o : seq) {
    if (o->is_write) {
      last_write = o;
    } else {
      bool ok = last_write == nullptr ? o->tag == kTag0
                                      : last_write->tag == o->tag && last_write->val == o->val;
      if (!ok)
        return fail(h, "atomicity", "candidate linearization failed replay", {o});
    }
  }
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[j]->precedes(*seq[i]))
        return fail(h, "atomicity", "candidate linearization violates real-time order",
                    {seq[i], seq[j]});
  return pass("atomicity");
}

}  // namespace

Verdict check_atomicity(const History& h) { return atomicity_impl(h); }

Verdict brute_force_linearizable(const History& h) {
  RegHistory reg = extract_register_ops(h);
  std::vector<const RegOp*> ops = reg.all();
  if (ops.size() > 8)
    throw std::invalid_argument("brute-force oracle limited to 8 operations");

  const Value* initial_value = nullptr;
  for (const auto& r : reg.reads) {
    if (r.tag != kTag0) continue;
    if (initial_value == nullptr)
      initial_value = &r.val;
    else if (*initial_value != r.val)
      return fail(h, "brute-force", "inconsistent reads of the initial version", {&r});
  }

  const std::size_t n = ops.size();
  std::uint32_t done = 0;
  std::function<bool(int)> dfs = [&](int last_write) -> bool {
    if (done == (1u << n) - 1) return true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done & (1u << i)) continue;
      bool eligible = true;
      for (std::size_t j = 0; j < n; ++j)
        if (!(done & (1u << j)) && i != j && ops[j]->precedes(*ops[i])) {
          eligible = false;
          break;
        }
      if (!eligible) continue;
      const RegOp* o = ops[i];
      if (o->is_write) {
        done |= 1u << i;
        if (dfs(static_cast<int>(i))) return true;
        done &= ~(1u << i);
      } else {
        bool matches = last_write < 0
                           ? o->tag == kTag0
                           : ops[last_write]->tag == o->tag && ops[last_write]->val == o->val;
        if (!matches) continue;
        done |= 1u << i;
        if (dfs(last_write)) return true;
        done &= ~(1u << i);
      }
    }
    return false;
  };
  if (dfs(-1)) return pass("brute-force");
  std::set<std::uint64_t> ids;
  for (const RegOp* o : ops) ids.insert(o->op_id);
  return Verdict{"brute-force", false, "no real-time-respecting sequential witness",
                 events_of(h, ids)};
}

Verdict check_property(const std::string& name, const History& h) {
  if (name == "atomicity") return check_atomicity(h);
  if (name == "validity") return check_validity(h);
  if (name == "consolidation") return check_consolidation(h);
  if (name == "continuity") return check_continuity(h);
  if (name == "evolution") return check_evolution(h);
  if (name == "strong") return check_strong(h);
  throw std::invalid_argument("unknown property: " + name);
}

std::vector<Verdict> check_all(const History& h, bool include_strong) {
  std::vector<Verdict> out;
  out.push_back(check_atomicity(h));
  out.push_back(check_validity(h));
  out.push_back(check_consolidation(h));
  out.push_back(check_continuity(h));
  out.push_back(check_evolution(h));
  if (include_strong) out.push_back(check_strong(h));
  return out;
}

History minimize_counterexample(const History& h, const std::string& property) {
  auto still_fails = [&](const History& cand) {
    try {
      return !check_property(property, cand).pass;
    } catch (const MalformedHistory&) {
      return false;
    }
  };
  if (!still_fails(h)) return h;
  auto records = pair_operations(h);
  if (records.size() > 200) return h;
  History current = h;
  for (const auto& r : records) {
    History trial;
    for (const auto& e : current)
      if (e.op_id != r.op_id) trial.push_back(e);
    if (trial.size() != current.size() && still_fails(trial)) current = std::move(trial);
  }
  return current;
}

}  // namespace covreg
