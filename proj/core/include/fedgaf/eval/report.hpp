#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedgaf/eval/metrics.hpp"

namespace fedgaf {

struct RoundClientLog {
  std::string id;
  std::uint32_t samples = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct RoundLog {
  int round = 0;
  std::vector<RoundClientLog> clients;
  std::uint64_t bytes_sent_cum = 0;
  std::uint64_t bytes_received_cum = 0;
};

// Everything a finished (or aborted) run reports: timing, traffic, accuracy
// overall and per class, the confusion matrix it derives from, a config echo
// and the per-round log. Emission is a pure function of this struct.
struct RunReport {
  bool aborted = false;
  std::string abort_reason;
  double train_time_sec = 0.0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::optional<double> train_accuracy;
  std::optional<double> test_accuracy;
  std::array<std::optional<double>, kNumClasses> per_class;
  ConfusionMatrix confusion;
  std::string config_echo;  // canonical JSON
  std::vector<RoundLog> rounds;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);

// Human-readable table with the same fields as the JSON report.
std::string report_to_markdown(const RunReport& report);

// One line per round, as written to rounds.log.
std::string rounds_log_text(const RunReport& report);

// Writes report.json and report.md into dir (creating it); byte-identical
// when re-emitted from the same data.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

}  // namespace fedgaf
