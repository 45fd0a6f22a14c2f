#include "fedgaf/fed/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fedgaf/errors.hpp"
#include "json.hpp"

namespace fedgaf {

namespace {

using nlohmann::json;

Aggregation aggregation_from(const std::string& s) {
  if (s == "uniform") return Aggregation::uniform;
  if (s == "sample-weighted") return Aggregation::sample_weighted;
  throw ConfigError("aggregation must be 'uniform' or 'sample-weighted', got '" + s + "'");
}

TransportMode mode_from(const std::string& s) {
  if (s == "loopback") return TransportMode::loopback;
  if (s == "tcp") return TransportMode::tcp;
  throw ConfigError("transport mode must be 'loopback' or 'tcp', got '" + s + "'");
}

}  // namespace

void FederationConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (local_epochs < 1) throw ConfigError("local_epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (clients.empty()) throw ConfigError("at least one client is required");
  if (timeout_sec <= 0.0) throw ConfigError("timeout_sec must be positive");
  if (threads < 1) throw ConfigError("threads must be at least 1");

  std::set<std::string> ids;
  double share_sum = 0.0;
  for (const ClientSpec& c : clients) {
    if (c.id.empty()) throw ConfigError("client id cannot be empty");
    if (c.id.size() > 255) throw ConfigError("client id longer than 255 bytes");
    if (!ids.insert(c.id).second) throw ConfigError("duplicate client id: " + c.id);
    if (c.share <= 0.0) throw ConfigError("client share must be positive: " + c.id);
    share_sum += c.share;
  }
  if (std::abs(share_sum - 1.0) > 1e-9) {
    throw ConfigError("client shares must sum to 1, got " + std::to_string(share_sum));
  }
  fedgaf::validate(model);
}

FederationConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  FederationConfig cfg;
  try {
    cfg.rounds = j.value("rounds", cfg.rounds);
    cfg.local_epochs = j.value("local_epochs", cfg.local_epochs);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    if (j.contains("aggregation")) {
      cfg.aggregation = aggregation_from(j["aggregation"].get<std::string>());
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("clients")) {
      for (const auto& c : j["clients"]) {
        cfg.clients.push_back(ClientSpec{c.at("id").get<std::string>(),
                                         c.at("share").get<double>()});
      }
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      cfg.model.c1 = m.value("c1", cfg.model.c1);
      cfg.model.c2 = m.value("c2", cfg.model.c2);
      cfg.model.c3 = m.value("c3", cfg.model.c3);
      cfg.model.c4 = m.value("c4", cfg.model.c4);
      cfg.model.fc = m.value("fc", cfg.model.fc);
      cfg.model.classes = m.value("classes", cfg.model.classes);
      cfg.model.alpha = m.value("alpha", cfg.model.alpha);
    }
    if (j.contains("transport")) {
      const auto& t = j["transport"];
      if (t.contains("mode")) cfg.transport_mode = mode_from(t["mode"].get<std::string>());
      cfg.timeout_sec = t.value("timeout_sec", cfg.timeout_sec);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

FederationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const FederationConfig& cfg) {
  json j;
  j["rounds"] = cfg.rounds;
  j["local_epochs"] = cfg.local_epochs;
  j["lr"] = cfg.lr;
  j["batch_size"] = cfg.batch_size;
  j["aggregation"] =
      cfg.aggregation == Aggregation::uniform ? "uniform" : "sample-weighted";
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["clients"] = json::array();
  for (const ClientSpec& c : cfg.clients) {
    j["clients"].push_back({{"id", c.id}, {"share", c.share}});
  }
  j["model"] = {{"c1", cfg.model.c1}, {"c2", cfg.model.c2}, {"c3", cfg.model.c3},
                {"c4", cfg.model.c4}, {"fc", cfg.model.fc},
                {"classes", cfg.model.classes}, {"alpha", cfg.model.alpha}};
  j["transport"] = {
      {"mode", cfg.transport_mode == TransportMode::loopback ? "loopback" : "tcp"},
      {"timeout_sec", cfg.timeout_sec}};
  return j.dump(2) + "\n";
}

}  // namespace fedgaf
