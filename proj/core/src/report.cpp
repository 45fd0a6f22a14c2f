#include "fedgaf/eval/report.hpp"

#include <cstdio>
#include <fstream>

#include "fedgaf/errors.hpp"
#include "json.hpp"

namespace fedgaf {

namespace {

using nlohmann::json;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string percent_or_na(const std::optional<double>& v) {
  return v ? fixed(*v * 100.0, 2) + "%" : "n/a";
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> number_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  json j;
  j["aborted"] = r.aborted;
  j["abort_reason"] = r.abort_reason;
  j["train_time_sec"] = r.train_time_sec;
  j["bytes_sent"] = r.bytes_sent;
  j["bytes_received"] = r.bytes_received;
  j["train_accuracy"] = optional_number(r.train_accuracy);
  j["test_accuracy"] = optional_number(r.test_accuracy);
  j["per_class_accuracy"] = json::array();
  for (const auto& v : r.per_class) j["per_class_accuracy"].push_back(optional_number(v));
  j["confusion"] = json::array();
  for (const auto& row : r.confusion.counts) {
    json jrow = json::array();
    for (std::uint64_t v : row) jrow.push_back(v);
    j["confusion"].push_back(jrow);
  }
  j["config"] = r.config_echo.empty() ? json(nullptr) : json::parse(r.config_echo);
  j["rounds"] = json::array();
  for (const RoundLog& log : r.rounds) {
    json jr;
    jr["round"] = log.round;
    jr["bytes_sent_cum"] = log.bytes_sent_cum;
    jr["bytes_received_cum"] = log.bytes_received_cum;
    jr["clients"] = json::array();
    for (const RoundClientLog& c : log.clients) {
      jr["clients"].push_back({{"id", c.id},
                               {"samples", c.samples},
                               {"loss", c.loss},
                               {"accuracy", c.accuracy}});
    }
    j["rounds"].push_back(jr);
  }
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DeserializeError(std::string("report is not valid JSON: ") + e.what());
  }
  RunReport r;
  try {
    r.aborted = j.value("aborted", false);
    r.abort_reason = j.value("abort_reason", std::string());
    r.train_time_sec = j.value("train_time_sec", 0.0);
    r.bytes_sent = j.value("bytes_sent", std::uint64_t{0});
    r.bytes_received = j.value("bytes_received", std::uint64_t{0});
    r.train_accuracy = number_or_null(j.at("train_accuracy"));
    r.test_accuracy = number_or_null(j.at("test_accuracy"));
    const auto& pc = j.at("per_class_accuracy");
    for (int c = 0; c < kNumClasses; ++c) r.per_class[c] = number_or_null(pc.at(c));
    const auto& cm = j.at("confusion");
    for (int y = 0; y < kNumClasses; ++y) {
      for (int x = 0; x < kNumClasses; ++x) {
        r.confusion.counts[y][x] = cm.at(y).at(x).get<std::uint64_t>();
      }
    }
    if (!j.at("config").is_null()) r.config_echo = j.at("config").dump(2) + "\n";
    for (const auto& jr : j.at("rounds")) {
      RoundLog log;
      log.round = jr.at("round").get<int>();
      log.bytes_sent_cum = jr.at("bytes_sent_cum").get<std::uint64_t>();
      log.bytes_received_cum = jr.at("bytes_received_cum").get<std::uint64_t>();
      for (const auto& jc : jr.at("clients")) {
        log.clients.push_back(RoundClientLog{jc.at("id").get<std::string>(),
                                             jc.at("samples").get<std::uint32_t>(),
                                             jc.at("loss").get<double>(),
                                             jc.at("accuracy").get<double>()});
      }
      r.rounds.push_back(std::move(log));
    }
  } catch (const json::exception& e) {
    throw DeserializeError(std::string("bad report field: ") + e.what());
  }
  return r;
}

std::string report_to_markdown(const RunReport& r) {
  std::string md;
  md += "# Run report\n\n";
  if (r.aborted) {
    md += "**Status: aborted** — " + r.abort_reason + "\n\n";
  }
  md += "| Metric | Value |\n|---|---|\n";
  md += "| Training time | " + fixed(r.train_time_sec, 2) + " sec |\n";
  md += "| Total send size | " + std::to_string(r.bytes_sent) + " bytes |\n";
  md += "| Total receive size | " + std::to_string(r.bytes_received) + " bytes |\n";
  md += "| Train accuracy | " + percent_or_na(r.train_accuracy) + " |\n";
  md += "| Test accuracy | " + percent_or_na(r.test_accuracy) + " |\n";
  std::string per_class;
  for (int c = 0; c < kNumClasses; ++c) {
    if (c) per_class += ", ";
    per_class += percent_or_na(r.per_class[c]);
  }
  md += "| Accuracy by class (N, L, R, A, V) | " + per_class + " |\n\n";

  if (r.test_accuracy) {
    md += "## Confusion matrix (rows: true, columns: predicted)\n\n";
    md += "| | N | L | R | A | V |\n|---|---|---|---|---|---|\n";
    const char* names = "NLRAV";
    for (int y = 0; y < kNumClasses; ++y) {
      md += std::string("| **") + names[y] + "** |";
      for (int x = 0; x < kNumClasses; ++x) {
        md += " " + std::to_string(r.confusion.counts[y][x]) + " |";
      }
      md += "\n";
    }
    md += "\n";
  }

  if (!r.rounds.empty()) {
    md += "## Rounds\n\n";
    md += "| Round | Clients (id: samples, loss, acc) | Sent (cum) | Received (cum) |\n";
    md += "|---|---|---|---|\n";
    for (const RoundLog& log : r.rounds) {
      std::string clients;
      for (std::size_t i = 0; i < log.clients.size(); ++i) {
        const RoundClientLog& c = log.clients[i];
        if (i) clients += "; ";
        clients += c.id + ": " + std::to_string(c.samples) + ", " +
                   fixed(c.loss, 4) + ", " + fixed(c.accuracy, 4);
      }
      md += "| " + std::to_string(log.round) + " | " + clients + " | " +
            std::to_string(log.bytes_sent_cum) + " | " +
            std::to_string(log.bytes_received_cum) + " |\n";
    }
    md += "\n";
  }

  if (!r.config_echo.empty()) {
    md += "## Configuration\n\n```json\n" + r.config_echo + "```\n";
  }
  return md;
}

std::string rounds_log_text(const RunReport& r) {
  std::string out;
  for (const RoundLog& log : r.rounds) {
    out += "round " + std::to_string(log.round);
    for (const RoundClientLog& c : log.clients) {
      out += " | " + c.id + " n=" + std::to_string(c.samples) +
             " loss=" + fixed(c.loss, 4) + " acc=" + fixed(c.accuracy, 4);
    }
    out += " | sent=" + std::to_string(log.bytes_sent_cum) +
           " recv=" + std::to_string(log.bytes_received_cum) + "\n";
  }
  return out;
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir.string());
  write_text(dir / "report.json", report_to_json(report));
  write_text(dir / "report.md", report_to_markdown(report));
}

}  // namespace fedgaf
