#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "covreg/history.hpp"
#include "covreg/register_client.hpp"

namespace covreg::testsupport {

/// Adapter: lets a bare RegisterClient live on the simulator as a process.
struct ClientShim : Automaton {
  RegisterClient* client;
  explicit ClientShim(RegisterClient* c) : client(c) {}
  void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& p) override {
    client->on_message(s, src, p);
  }
};

inline std::string fixture_path(const std::string& name) {
  return std::string(COVREG_FIXTURE_DIR) + "/" + name;
}

inline History load_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture: " + name);
  return parse_history_stream(in);
}

/// Random small register history: 1-8 operations over 2-3 processes with
/// arbitrary interleavings. Chg-write tags are kept unique (the domain on
/// which the cluster checker and the brute-force oracle are both defined);
/// observed pairs are forged freely — often consistent, sometimes corrupted —
/// so the sample mixes linearizable and broken histories.
inline History random_small_history(std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::size_t n_ops = 1 + pick(8);
  const ProcessId procs = 2 + static_cast<ProcessId>(pick(2));

  std::vector<Tag> tag_pool;
  for (std::uint64_t ts = 1; ts <= 4; ++ts)
    for (ProcessId w = 1; w <= 3; ++w) tag_pool.push_back(Tag{ts, w});
  std::shuffle(tag_pool.begin(), tag_pool.end(), rng);

  struct Plan {
    ProcessId proc = 1;
    bool is_write = false;  // chg write
    bool is_unchg = false;  // unchg write (observes like a read)
    Tag tag;                // produced or observed
    Value val;              // written or observed
    Tag target;             // writes: version revised
  };
  std::vector<Plan> plans;
  std::vector<Tag> produced;
  for (std::size_t i = 0; i < n_ops; ++i) {
    Plan p;
    p.proc = 1 + static_cast<ProcessId>(pick(procs));
    std::size_t kind = pick(3);
    if (kind == 0) {
      p.is_write = true;
      p.tag = tag_pool.back();
      tag_pool.pop_back();
      p.val = Value{static_cast<std::uint8_t>(0xa0 + pick(4))};
      p.target = produced.empty() || pick(2) == 0 ? kTag0 : produced[pick(produced.size())];
      produced.push_back(p.tag);
    } else {
      p.is_unchg = kind == 2;
    }
    plans.push_back(p);
  }
  // Forge observations after all writes are planned, so a read may name a
  // write that has not been invoked yet in the interleaving below.
  std::vector<std::pair<Tag, Value>> pairs{{kTag0, {}}};
  for (const auto& p : plans)
    if (p.is_write) pairs.emplace_back(p.tag, p.val);
  for (auto& p : plans) {
    if (p.is_write) continue;
    auto [t, v] = pairs[pick(pairs.size())];
    if (pick(10) == 0) v.push_back(0xee);  // wrong value for the tag
    if (pick(12) == 0) t = Tag{9, 9};      // tag nothing produced
    p.tag = t;
    p.val = v;
  }

  // Interleave: at each step either invoke a process's next op or respond
  // to its in-flight one, chosen at random among the available actions.
  std::vector<std::vector<std::size_t>> queue(procs + 1);
  for (std::size_t i = 0; i < plans.size(); ++i) queue[plans[i].proc].push_back(i);
  std::vector<std::size_t> next(procs + 1, 0);
  std::vector<std::optional<std::size_t>> in_flight(procs + 1);
  History h;
  std::uint64_t seq = 0;
  for (;;) {
    std::vector<std::pair<ProcessId, bool>> actions;  // (proc, is_invoke)
    for (ProcessId p = 1; p <= procs; ++p) {
      if (in_flight[p])
        actions.emplace_back(p, false);
      else if (next[p] < queue[p].size())
        actions.emplace_back(p, true);
    }
    if (actions.empty()) break;
    auto [proc, is_invoke] = actions[pick(actions.size())];
    HistoryEvent e;
    e.seq = ++seq;
    e.proc = proc;
    if (is_invoke) {
      std::size_t idx = queue[proc][next[proc]++];
      const Plan& p = plans[idx];
      in_flight[proc] = idx;
      e.kind = EventKind::invoke;
      e.op_id = idx + 1;
      if (p.is_write || p.is_unchg) {
        e.op = OpType::cvr_write;
        e.args = {{"val", to_hex(p.val)}, {"ver", tag_to_json(p.target)}};
      } else {
        e.op = OpType::cvr_read;
      }
    } else {
      std::size_t idx = *in_flight[proc];
      const Plan& p = plans[idx];
      in_flight[proc].reset();
      e.kind = EventKind::respond;
      e.op_id = idx + 1;
      if (p.is_write || p.is_unchg) {
        e.op = OpType::cvr_write;
        e.result = {{"val", to_hex(p.val)},
                    {"tag", tag_to_json(p.tag)},
                    {"flag", p.is_write ? "chg" : "unchg"}};
      } else {
        e.op = OpType::cvr_read;
        e.result = {{"val", to_hex(p.val)}, {"tag", tag_to_json(p.tag)}};
      }
    }
    h.push_back(std::move(e));
  }
  return h;
}

}  // namespace covreg::testsupport
