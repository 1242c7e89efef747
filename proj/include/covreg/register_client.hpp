#pragma once

#include <functional>
#include <vector>

#include "covreg/core.hpp"
#include "covreg/simnet.hpp"

namespace covreg {

/// Client-side protocol endpoint for a versioned register. Operations are
/// asynchronous: the continuation fires when the protocol completes, inside
/// some later on_message call. One operation may be outstanding at a time.
class RegisterClient {
 public:
  using WriteCb = std::function<void(Sim&, const WriteOutcome&)>;
  using ReadCb = std::function<void(Sim&, const Value&, const Tag&)>;

  virtual ~RegisterClient() = default;
  virtual void cvr_write(Sim& s, const Value& val, const Tag& ver, WriteCb done) = 0;
  virtual void cvr_read(Sim& s, ReadCb done) = 0;
  /// Feed a message addressed to this client's process.
  virtual void on_message(Sim& s, ProcessId src, const std::vector<std::uint8_t>& payload) = 0;
};

}  // namespace covreg
