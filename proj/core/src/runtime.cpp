#include "fedgaf/fed/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "fedgaf/errors.hpp"
#include "fedgaf/wire/bytes.hpp"
#include "fedgaf/wire/serialize.hpp"

namespace fedgaf {

std::vector<std::byte> encode_update_payload(const ClientUpdate& update) {
  ByteWriter w;
  w.u32(update.round);
  w.u32(update.sample_count);
  w.f32(static_cast<float>(update.metrics.mean_loss));
  w.f32(static_cast<float>(update.metrics.train_accuracy));
  const auto params = serialize_params(update.params);
  w.bytes(params);
  return w.take();
}

ClientUpdate decode_update_payload(std::span<const std::byte> payload,
                                   const std::string& client_id) {
  ByteReader r(payload);
  ClientUpdate u;
  u.client_id = client_id;
  u.round = r.u32();
  u.sample_count = r.u32();
  u.metrics.mean_loss = r.f32();
  u.metrics.train_accuracy = r.f32();
  u.params = deserialize_params(r.bytes(r.remaining()));
  return u;
}

namespace {

struct Session {
  std::string id;
  std::unique_ptr<Channel> channel;
};

std::chrono::milliseconds config_timeout(const FederationConfig& cfg) {
  return std::chrono::milliseconds(static_cast<long long>(cfg.timeout_sec * 1000.0));
}

}  // namespace

RunOutcome run_server(const FederationConfig& cfg, ChannelAcceptor& acceptor,
                      const std::vector<GafImage>& test_set,
                      const std::vector<GafImage>* train_union, ServerHooks hooks) {
  cfg.validate();
  CommStats local_stats;
  CommStats& stats = hooks.stats ? *hooks.stats : local_stats;
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = cfg.clients.size();
  const auto timeout = config_timeout(cfg);

  // Registration: every configured client must check in exactly once.
  std::vector<Session> sessions;
  sessions.reserve(n);
  {
    std::set<std::string> expected;
    for (const ClientSpec& c : cfg.clients) expected.insert(c.id);
    for (std::size_t i = 0; i < n; ++i) {
      auto ch = acceptor.accept();
      ch->set_read_timeout(timeout);
      Frame f = recv_frame(*ch, &stats);
      if (f.type != MessageType::register_client) {
        throw ProtocolError("expected REGISTER as the first message");
      }
      ByteReader r(f.payload);
      std::string id = r.str8();
      r.expect_end();
      if (expected.erase(id) == 0) {
        throw ProtocolError("unknown or duplicate client id: " + id);
      }
      sessions.push_back(Session{std::move(id), std::move(ch)});
    }
  }
  // Fixed aggregation order: ascending client id.
  std::sort(sessions.begin(), sessions.end(),
            [](const Session& a, const Session& b) { return a.id < b.id; });

  const int input_size = test_set.empty() ? 32 : test_set[0].size;
  ModelParams params = init_params(cfg.model, init_seed(cfg.seed), input_size);
  std::vector<std::byte> model_bytes = serialize_params(params);

  std::vector<std::optional<ClientUpdate>> updates(n);
  std::vector<RoundLog> logs;
  std::atomic<bool> failed{false};
  std::mutex fail_mutex;
  std::string fail_reason;

  auto record_failure = [&](const std::string& reason) {
    {
      std::lock_guard lock(fail_mutex);
      if (fail_reason.empty()) fail_reason = reason;
    }
    failed.store(true);
    for (Session& s : sessions) s.channel->close();  // wake blocked reads
  };

  // Runs on the last thread to arrive each round; the barrier orders its
  // writes before the next round's sends.
  auto completion = [&]() noexcept {
    if (failed.load()) return;
    try {
      std::vector<ClientUpdate> batch;
      batch.reserve(n);
      for (auto& u : updates) {
        batch.push_back(std::move(*u));
        u.reset();
      }
      params = aggregate(batch, cfg.aggregation);
      const int round = static_cast<int>(logs.size()) + 1;
      if (round < cfg.rounds) model_bytes = serialize_params(params);

      RoundLog log;
      log.round = round;
      for (const ClientUpdate& u : batch) {
        log.clients.push_back(RoundClientLog{u.client_id, u.sample_count,
                                             u.metrics.mean_loss,
                                             u.metrics.train_accuracy});
      }
      log.bytes_sent_cum = stats.bytes_sent.load();
      log.bytes_received_cum = stats.bytes_received.load();
      logs.push_back(log);
      if (hooks.on_round) hooks.on_round(log);
    } catch (const std::exception& e) {
      record_failure(std::string("aggregation failed: ") + e.what());
    }
  };

  std::barrier sync(static_cast<std::ptrdiff_t>(n), completion);

  auto worker = [&](std::size_t i) {
    Session& s = sessions[i];
    for (int r = 1; r <= cfg.rounds; ++r) {
      if (failed.load()) {
        sync.arrive_and_drop();
        return;
      }
      try {
        send_frame(*s.channel, MessageType::global_model, model_bytes, &stats);
        Frame f = recv_frame(*s.channel, &stats);
        if (f.type != MessageType::local_update) {
          throw ProtocolError("expected LOCAL_UPDATE");
        }
        ClientUpdate u = decode_update_payload(f.payload, s.id);
        if (u.round != static_cast<std::uint32_t>(r)) {
          throw ProtocolError("update carries round " + std::to_string(u.round) +
                              " during round " + std::to_string(r));
        }
        updates[i] = std::move(u);
      } catch (const std::exception& e) {
        record_failure("client '" + s.id + "': " + e.what());
        sync.arrive_and_drop();
        return;
      }
      sync.arrive_and_wait();
    }
    if (!failed.load()) {
      try {
        send_frame(*s.channel, MessageType::done, {}, &stats);
      } catch (const std::exception&) {
        // the run is already complete; a failed DONE only affects the peer
      }
    }
    s.channel->close();
  };

  {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker, i);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) {
    std::lock_guard lock(fail_mutex);
    throw RoundAbortError("round aborted: " + fail_reason);
  }

  RunOutcome out;
  out.params = std::move(params);
  out.report.train_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out.report.bytes_sent = stats.bytes_sent.load();
  out.report.bytes_received = stats.bytes_received.load();
  out.report.rounds = std::move(logs);
  out.report.config_echo = config_to_json(cfg);
  if (!test_set.empty()) {
    const Evaluation ev = evaluate(out.params, cfg.model, test_set);
    out.report.test_accuracy = ev.accuracy;
    out.report.confusion = ev.matrix;
    out.report.per_class = per_class_accuracy(ev.matrix);
  }
  if (train_union != nullptr && !train_union->empty()) {
    out.report.train_accuracy = evaluate(out.params, cfg.model, *train_union).accuracy;
  }
  return out;
}

void run_client(const FederationConfig& cfg, Channel& ch, const std::string& id,
                const std::vector<GafImage>& shard, CommStats* stats_out) {
  cfg.validate();
  if (shard.empty()) throw ConfigError("client '" + id + "' has an empty shard");
  CommStats local_stats;
  CommStats& stats = stats_out ? *stats_out : local_stats;
  ch.set_read_timeout(config_timeout(cfg));

  try {
    ByteWriter w;
    w.str8(id);
    send_frame(ch, MessageType::register_client, w.data(), &stats);
  } catch (const ChannelClosed&) {
    throw ClientAbortError("server closed the connection");
  }

  const auto expected = param_shapes(cfg.model, shard[0].size);
  std::uint32_t round = 0;
  for (;;) {
    Frame f;
    try {
      f = recv_frame(ch, &stats);
    } catch (const ChannelClosed&) {
      throw ClientAbortError("server closed the connection");
    } catch (const TimeoutError&) {
      throw ClientAbortError("timed out waiting for the server");
    }
    if (f.type == MessageType::done) break;
    if (f.type != MessageType::global_model) {
      throw ProtocolError("unexpected message type from server");
    }
    round += 1;

    ModelParams global;
    try {
      global = deserialize_params(f.payload);
    } catch (const DeserializeError& e) {
      throw ProtocolError(std::string("malformed model payload: ") + e.what());
    }
    if (global.entries.size() != expected.size()) {
      throw ProtocolError("received model does not match the configured spec");
    }
    for (std::size_t p = 0; p < expected.size(); ++p) {
      if (global.entries[p].first != expected[p].first ||
          global.entries[p].second.shape != expected[p].second) {
        throw ProtocolError("received model does not match the configured spec ('" +
                            expected[p].first + "')");
      }
    }

    const ClientUpdate update =
        local_update(global, cfg.model, shard, cfg.local_epochs, cfg.adam(),
                     cfg.batch_size, cfg.seed, round, id, cfg.threads);
    const auto payload = encode_update_payload(update);
    try {
      send_frame(ch, MessageType::local_update, payload, &stats);
    } catch (const ChannelClosed&) {
      throw ClientAbortError("server closed the connection");
    }
  }
  ch.close();
}

namespace {

class VectorAcceptor final : public ChannelAcceptor {
 public:
  explicit VectorAcceptor(std::vector<std::unique_ptr<Channel>> channels)
      : channels_(std::move(channels)) {}

  std::unique_ptr<Channel> accept() override {
    if (next_ >= channels_.size()) throw IoError("no more pending channels");
    return std::move(channels_[next_++]);
  }

 private:
  std::vector<std::unique_ptr<Channel>> channels_;
  std::size_t next_ = 0;
};

}  // namespace

RunOutcome simulate(const FederationConfig& cfg,
                    const std::vector<std::vector<GafImage>>& shards,
                    const std::vector<GafImage>& test_set,
                    const std::vector<GafImage>* train_union, ServerHooks hooks) {
  cfg.validate();
  if (shards.size() != cfg.clients.size()) {
    throw ConfigError("expected one shard per configured client, got " +
                      std::to_string(shards.size()) + " for " +
                      std::to_string(cfg.clients.size()) + " clients");
  }

  const std::size_t n = cfg.clients.size();
  std::vector<std::unique_ptr<Channel>> server_ends;
  std::vector<std::shared_ptr<Channel>> client_ends;
  for (std::size_t i = 0; i < n; ++i) {
    auto [server_end, client_end] = loopback_channel_pair();
    server_ends.push_back(std::move(server_end));
    client_ends.push_back(std::move(client_end));
  }
  VectorAcceptor acceptor(std::move(server_ends));

  std::vector<std::exception_ptr> client_errors(n);
  std::vector<std::thread> clients;
  clients.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    clients.emplace_back([&, i] {
      try {
        run_client(cfg, *client_ends[i], cfg.clients[i].id, shards[i]);
      } catch (...) {
        client_errors[i] = std::current_exception();
        client_ends[i]->close();
      }
    });
  }

  std::exception_ptr server_error;
  RunOutcome outcome;
  try {
    outcome = run_server(cfg, acceptor, test_set, train_union, hooks);
  } catch (...) {
    server_error = std::current_exception();
    for (auto& ch : client_ends) ch->close();
  }
  for (auto& t : clients) t.join();

  if (server_error) std::rethrow_exception(server_error);
  for (const auto& err : client_errors) {
    if (err) std::rethrow_exception(err);
  }
  return outcome;
}

}  // namespace fedgaf
