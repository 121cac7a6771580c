#include "wfsim/queue.hpp"

#include "wfsim/errors.hpp"

namespace wfsim {

std::string_view to_string(PullResult::Kind kind) {
  switch (kind) {
    case PullResult::Kind::Data: return "data";
    case PullResult::Kind::Wait: return "wait";
    case PullResult::Kind::Empty: return "empty";
  }
  return "empty";
}

QueueState::QueueState(std::optional<std::size_t> capacity) : capacity_(capacity) {
  if (capacity_ && *capacity_ == 0) throw ConfigError("queue capacity must be positive");
}

SenderId QueueState::connect() {
  SenderId id = next_sender_++;
  connected_.insert(id);
  return id;
}

void QueueState::require_connected(SenderId sender, const char* op) const {
  if (!connected_.contains(sender))
    throw ProtocolError(std::string(op) + " on sender " + std::to_string(sender) +
                        " that is not connected");
}

void QueueState::disconnect(SenderId sender) {
  require_connected(sender, "disconnect");
  connected_.erase(sender);
}

bool QueueState::try_push(SenderId sender, const DataItem& item) {
  require_connected(sender, "push");
  if (full()) return false;
  items_.push_back(item);
  return true;
}

PullResult QueueState::pull(ReceiverId receiver) {
  if (terminated_.contains(receiver))
    throw ProtocolError("pull after empty by receiver " + std::to_string(receiver));
  if (!items_.empty()) {
    DataItem front = items_.front();
    items_.pop_front();
    return PullResult::data(front);
  }
  if (!connected_.empty()) return PullResult::wait();
  terminated_.insert(receiver);
  return PullResult::empty();
}

SenderId TaskQueue::connect() {
  std::lock_guard lock(mutex_);
  return state_.connect();
}

void TaskQueue::disconnect(SenderId sender) {
  std::lock_guard lock(mutex_);
  state_.disconnect(sender);
}

void TaskQueue::push(SenderId sender, const DataItem& item) {
  std::unique_lock lock(mutex_);
  while (!state_.try_push(sender, item)) space_.wait(lock);
}

PullResult TaskQueue::pull(ReceiverId receiver) {
  PullResult result;
  {
    std::lock_guard lock(mutex_);
    result = state_.pull(receiver);
  }
  if (result.is_data()) space_.notify_one();
  return result;
}

std::size_t TaskQueue::size() const {
  std::lock_guard lock(mutex_);
  return state_.size();
}

std::size_t TaskQueue::connected_senders() const {
  std::lock_guard lock(mutex_);
  return state_.connected_senders();
}

std::string encode_frame(const nlohmann::json& document) {
  std::string body = document.dump();
  auto n = static_cast<std::uint32_t>(body.size());
  std::string frame;
  frame.reserve(4 + body.size());
  for (int shift = 24; shift >= 0; shift -= 8) frame.push_back(static_cast<char>((n >> shift) & 0xff));
  frame += body;
  return frame;
}

nlohmann::json decode_frame(std::string_view frame) {
  if (frame.size() < 4) throw ProtocolError("truncated frame header");
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n = (n << 8) | static_cast<unsigned char>(frame[static_cast<std::size_t>(i)]);
  if (frame.size() != 4 + static_cast<std::size_t>(n)) throw ProtocolError("frame length mismatch");
  nlohmann::json doc = nlohmann::json::parse(frame.substr(4), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ProtocolError("frame body is not a JSON object");
  if (doc.value("v", -1) != kProtocolVersion) throw ProtocolError("unsupported protocol version");
  return doc;
}

std::string QueueServer::handle(std::string_view request) {
  nlohmann::json reply = {{"v", kProtocolVersion}};
  try {
    auto doc = decode_frame(request);
    auto op = doc.at("op").get<std::string>();
    if (op == "connect") {
      reply["status"] = "ok";
      reply["sender"] = queue_.connect();
    } else if (op == "push") {
      queue_.push(doc.at("sender").get<SenderId>(), doc.at("payload").get<DataItem>());
      reply["status"] = "ok";
    } else if (op == "done") {
      queue_.disconnect(doc.at("sender").get<SenderId>());
      reply["status"] = "ok";
    } else if (op == "pull") {
      auto result = queue_.pull(doc.at("receiver").get<ReceiverId>());
      reply["status"] = to_string(result.kind);
      if (result.item) reply["payload"] = *result.item;
    } else {
      throw ProtocolError("unknown op: " + op);
    }
  } catch (const std::exception& e) {
    reply = {{"v", kProtocolVersion}, {"status", "error"}, {"message", e.what()}};
  }
  return encode_frame(reply);
}

nlohmann::json QueueClient::call(const nlohmann::json& request) {
  auto reply = decode_frame(server_->handle(encode_frame(request)));
  if (reply.value("status", std::string()) == "error")
    throw ProtocolError(reply.value("message", std::string("queue error")));
  return reply;
}

SenderId QueueClient::connect() {
  return call({{"v", kProtocolVersion}, {"op", "connect"}}).at("sender").get<SenderId>();
}

void QueueClient::push(SenderId sender, const DataItem& item) {
  call({{"v", kProtocolVersion}, {"op", "push"}, {"sender", sender}, {"payload", item}});
}

void QueueClient::done(SenderId sender) {
  call({{"v", kProtocolVersion}, {"op", "done"}, {"sender", sender}});
}

PullResult QueueClient::pull(ReceiverId receiver) {
  auto reply = call({{"v", kProtocolVersion}, {"op", "pull"}, {"receiver", receiver}});
  auto status = reply.at("status").get<std::string>();
  if (status == "data") return PullResult::data(reply.at("payload").get<DataItem>());
  if (status == "wait") return PullResult::wait();
  if (status == "empty") return PullResult::empty();
  throw ProtocolError("unknown pull status: " + status);
}

}  // namespace wfsim
