#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fedgaf/eval/report.hpp"
#include "fedgaf/fed/fedavg.hpp"
#include "fedgaf/wire/channel.hpp"
#include "fedgaf/wire/frame.hpp"

namespace fedgaf {

// LOCAL_UPDATE payload: u32 round, u32 sample count, f32 mean loss,
// f32 train accuracy, then the serialized parameters.
std::vector<std::byte> encode_update_payload(const ClientUpdate& update);
ClientUpdate decode_update_payload(std::span<const std::byte> payload,
                                   const std::string& client_id);

// Hands the server one registered transport per expected client.
class ChannelAcceptor {
 public:
  virtual ~ChannelAcceptor() = default;
  virtual std::unique_ptr<Channel> accept() = 0;
};

struct RunOutcome {
  ModelParams params;
  RunReport report;
};

struct ServerHooks {
  CommStats* stats = nullptr;                        // external counters, optional
  std::function<void(const RoundLog&)> on_round;     // called after each round
};

// Round-based federation server: accepts and registers every configured
// client, then runs R rounds of broadcast / collect / aggregate with no
// partial rounds, and finally sends DONE and evaluates. A client failure or
// timeout aborts the round (RoundAbortError naming the client).
RunOutcome run_server(const FederationConfig& cfg, ChannelAcceptor& acceptor,
                      const std::vector<GafImage>& test_set,
                      const std::vector<GafImage>* train_union = nullptr,
                      ServerHooks hooks = {});

// Client loop: register, then train on each received global model and send
// the update back until DONE arrives. Connection loss raises
// ClientAbortError; malformed or mismatched models raise ProtocolError.
void run_client(const FederationConfig& cfg, Channel& ch, const std::string& id,
                const std::vector<GafImage>& shard, CommStats* stats = nullptr);

// Single-process run over loopback channels with semantics identical to a
// TCP deployment, including byte accounting.
RunOutcome simulate(const FederationConfig& cfg,
                    const std::vector<std::vector<GafImage>>& shards,
                    const std::vector<GafImage>& test_set,
                    const std::vector<GafImage>* train_union = nullptr,
                    ServerHooks hooks = {});

}  // namespace fedgaf
