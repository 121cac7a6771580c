#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wfsim/workload.hpp"

namespace wfsim {

using SenderId = std::uint64_t;
using ReceiverId = std::uint64_t;

struct PullResult {
  enum class Kind { Data, Wait, Empty };
  Kind kind = Kind::Empty;
  std::optional<DataItem> item;

  static PullResult data(DataItem d) { return {Kind::Data, d}; }
  static PullResult wait() { return {Kind::Wait, std::nullopt}; }
  static PullResult empty() { return {Kind::Empty, std::nullopt}; }

  bool is_data() const { return kind == Kind::Data; }
  bool is_wait() const { return kind == Kind::Wait; }
  bool is_empty() const { return kind == Kind::Empty; }
};

std::string_view to_string(PullResult::Kind kind);

/// Sender/Receiver/Queue state machine.
///
///   items present                      -> Data(front)
///   no items, >= 1 sender connected    -> Wait
///   no items, no sender connected      -> Empty (receiver terminates)
///
/// Not thread-safe; TaskQueue adds locking. The discrete-event simulator
/// drives this type directly.
class QueueState {
 public:
  explicit QueueState(std::optional<std::size_t> capacity = std::nullopt);

  SenderId connect();
  void disconnect(SenderId sender);

  /// Returns false (and leaves the queue unchanged) when the queue is full.
  bool try_push(SenderId sender, const DataItem& item);

  PullResult pull(ReceiverId receiver);

  std::size_t size() const { return items_.size(); }
  bool full() const { return capacity_ && items_.size() >= *capacity_; }
  std::size_t connected_senders() const { return connected_.size(); }
  std::optional<std::size_t> capacity() const { return capacity_; }
  const std::deque<DataItem>& items() const { return items_; }
  bool terminated(ReceiverId receiver) const { return terminated_.contains(receiver); }

 private:
  void require_connected(SenderId sender, const char* op) const;

  std::optional<std::size_t> capacity_;
  std::deque<DataItem> items_;
  std::set<SenderId> connected_;
  SenderId next_sender_ = 1;
  std::set<ReceiverId> terminated_;
};

/// Linearizable, thread-safe queue. `push` blocks while a bounded queue is
/// full; `pull` never blocks.
class TaskQueue {
 public:
  explicit TaskQueue(std::optional<std::size_t> capacity = std::nullopt) : state_(capacity) {}

  SenderId connect();
  void disconnect(SenderId sender);
  void push(SenderId sender, const DataItem& item);
  PullResult pull(ReceiverId receiver);

  std::size_t size() const;
  std::size_t connected_senders() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable space_;
  QueueState state_;
};

// Local message transport.
//
// Frame layout (protocol version 1):
//   4 bytes   big-endian unsigned payload length N
//   N bytes   UTF-8 JSON document
// Requests:  {"v":1,"op":"connect"}
//            {"v":1,"op":"push","sender":S,"payload":{id,size_mb,kind}}
//            {"v":1,"op":"done","sender":S}
//            {"v":1,"op":"pull","receiver":R}
// Replies:   {"v":1,"status":"ok"[,"sender":S]}
//            {"v":1,"status":"data","payload":{...}} | "wait" | "empty"
//            {"v":1,"status":"error","message":"..."}
inline constexpr int kProtocolVersion = 1;

std::string encode_frame(const nlohmann::json& document);
/// Throws ProtocolError on truncated frames, trailing bytes or a version
/// mismatch.
nlohmann::json decode_frame(std::string_view frame);

class QueueServer {
 public:
  explicit QueueServer(std::optional<std::size_t> capacity = std::nullopt) : queue_(capacity) {}

  /// Handle one request frame and produce the reply frame. Thread-safe.
  std::string handle(std::string_view request);

  TaskQueue& queue() { return queue_; }

 private:
  TaskQueue queue_;
};

/// Client side of the transport; raises ProtocolError for error replies.
class QueueClient {
 public:
  explicit QueueClient(QueueServer& server) : server_(&server) {}

  SenderId connect();
  void push(SenderId sender, const DataItem& item);
  void done(SenderId sender);
  PullResult pull(ReceiverId receiver);

 private:
  nlohmann::json call(const nlohmann::json& request);

  QueueServer* server_;
};

}  // namespace wfsim
