// fedgaf command-line front end: dataset ingest and synthesis, GAF encoding,
// federated runs (TCP server/client and single-process simulation), model
// evaluation and report regeneration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedgaf/dataset.hpp"
#include "fedgaf/errors.hpp"
#include "fedgaf/eval/metrics.hpp"
#include "fedgaf/eval/report.hpp"
#include "fedgaf/fed/runtime.hpp"
#include "fedgaf/gaf.hpp"
#include "fedgaf/wfdb.hpp"
#include "fedgaf/wire/serialize.hpp"
#include "fedgaf/wire/tcp.hpp"

namespace fs = std::filesystem;
using namespace fedgaf;

namespace {

std::vector<double> parse_share_list(const std::string& text) {
  std::vector<double> shares;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      shares.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad share value: '" + tok + "'");
    }
  }
  if (shares.empty()) throw ConfigError("empty share list");
  return shares;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

EncodeConfig parse_encode_flags(const std::string& method, const std::string& range,
                                const std::string& resize, int size) {
  EncodeConfig cfg;
  if (method == "gasf") {
    cfg.method = GafMethod::gasf;
  } else if (method == "gadf") {
    cfg.method = GafMethod::gadf;
  } else {
    throw ConfigError("method must be gasf or gadf, got '" + method + "'");
  }
  if (range == "-1,1") {
    cfg.range = RescaleRange::minus_one_one;
  } else if (range == "0,1") {
    cfg.range = RescaleRange::zero_one;
  } else {
    throw ConfigError("range must be '-1,1' or '0,1', got '" + range + "'");
  }
  if (resize == "bilinear") {
    cfg.resize = ResizePath::bilinear_image;
  } else if (resize == "paa") {
    cfg.resize = ResizePath::paa_first;
  } else {
    throw ConfigError("resize must be bilinear or paa, got '" + resize + "'");
  }
  cfg.output_size = size;
  return cfg;
}

void print_class_counts(const DatasetManifest& m, const char* tag) {
  const auto counts = m.class_counts();
  std::printf("%s: %zu beats (", tag, m.beats.size());
  for (int c = 0; c < kNumClasses; ++c) {
    std::printf("%c=%zu%s", label_char(static_cast<BeatLabel>(c)), counts[c],
                c + 1 < kNumClasses ? " " : ")\n");
  }
}

// Run directory layout: config.json, report.json, report.md, model_final.bin,
// rounds.log.
void write_run_dir(const fs::path& dir, const FederationConfig& cfg,
                   const RunOutcome& outcome) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory: " + dir.string());
  {
    std::ofstream out(dir / "config.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write config.json");
    out << config_to_json(cfg);
  }
  emit_report(outcome.report, dir);
  save_checkpoint(dir / "model_final.bin", cfg.model, outcome.params);
  {
    std::ofstream out(dir / "rounds.log", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write rounds.log");
    out << rounds_log_text(outcome.report);
  }
}

void write_partial_run_dir(const fs::path& dir, const FederationConfig& cfg,
                           const std::string& reason, const CommStats& stats,
                           const std::vector<RoundLog>& rounds) {
  RunReport report;
  report.aborted = true;
  report.abort_reason = reason;
  report.bytes_sent = stats.bytes_sent.load();
  report.bytes_received = stats.bytes_received.load();
  report.rounds = rounds;
  report.config_echo = config_to_json(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return;
  emit_report(report, dir);
}

void print_summary(const RunReport& r) {
  std::printf("train time: %.2f sec\n", r.train_time_sec);
  std::printf("bytes sent/received: %llu / %llu\n",
              static_cast<unsigned long long>(r.bytes_sent),
              static_cast<unsigned long long>(r.bytes_received));
  if (r.train_accuracy) std::printf("train accuracy: %.4f\n", *r.train_accuracy);
  if (r.test_accuracy) std::printf("test accuracy:  %.4f\n", *r.test_accuracy);
  const char* names = "NLRAV";
  for (int c = 0; c < kNumClasses; ++c) {
    if (r.per_class[c]) {
      std::printf("  class %c: %.4f\n", names[c], *r.per_class[c]);
    } else {
      std::printf("  class %c: n/a\n", names[c]);
    }
  }
}

struct IngestArgs {
  std::string data_dir, out = "beats.fgds", classes = "N,L,R,A,V";
  int window = 128;
  std::size_t max_per_class = 0;
};

void cmd_ingest(const IngestArgs& a) {
  const auto wanted_names = parse_name_list(a.classes);
  std::array<bool, kNumClasses> wanted{};
  for (const std::string& name : wanted_names) {
    if (name.size() != 1 || !label_from_char(name[0])) {
      throw ConfigError("unknown class '" + name + "' (choose from N,L,R,A,V)");
    }
    wanted[static_cast<int>(*label_from_char(name[0]))] = true;
  }

  std::vector<fs::path> headers;
  for (const auto& entry : fs::directory_iterator(a.data_dir)) {
    if (entry.path().extension() == ".hea") headers.push_back(entry.path());
  }
  if (headers.empty()) throw ConfigError("no .hea files under " + a.data_dir);
  std::sort(headers.begin(), headers.end());

  DatasetManifest manifest;
  manifest.window = static_cast<std::uint16_t>(a.window);
  std::size_t dropped = 0;
  for (const fs::path& hea : headers) {
    const WfdbRecord rec = load_record(hea);
    if (rec.annotations.empty()) {
      std::fprintf(stderr, "warning: record %s has no annotations\n",
                   rec.header.record_name.c_str());
      continue;
    }
    ExtractResult r = extract_beats(rec.channel0_mv, rec.annotations, a.window,
                                    default_beat_codes(), rec.header.record_name);
    dropped += r.dropped;
    for (BeatRecord& b : r.beats) {
      if (wanted[static_cast<int>(b.label)]) manifest.beats.push_back(std::move(b));
    }
  }
  if (a.max_per_class > 0) {
    DatasetManifest capped;
    capped.window = manifest.window;
    std::array<std::size_t, kNumClasses> kept{};
    for (BeatRecord& b : manifest.beats) {
      auto& k = kept[static_cast<int>(b.label)];
      if (k < a.max_per_class) {
        capped.beats.push_back(std::move(b));
        k += 1;
      }
    }
    manifest = std::move(capped);
  }
  if (dropped > 0) {
    std::fprintf(stderr, "warning: dropped %zu boundary beats\n", dropped);
  }
  save_beats(a.out, manifest);
  print_class_counts(manifest, "ingested");
}

struct SynthArgs {
  std::string out = "synth.fgds";
  int per_class = 200, window = 128;
  std::uint64_t seed = 0;
  double noise = 0.1;
};

void cmd_synth(const SynthArgs& a) {
  const DatasetManifest m = synth_dataset(kNumClasses, a.per_class, a.window, a.seed, a.noise);
  save_beats(a.out, m);
  print_class_counts(m, "synthesized");
}

struct SplitArgs {
  std::string in, train_out, test_out;
  double train_frac = 0.5;
  std::uint64_t seed = 0;
};

void cmd_split(const SplitArgs& a) {
  const DatasetManifest beats = load_beats(a.in);
  const SplitResult split = split_train_test(beats, a.train_frac, a.seed);
  const fs::path base(a.in);
  const fs::path train_path = a.train_out.empty()
                                  ? fs::path(base).replace_extension(".train.fgds")
                                  : fs::path(a.train_out);
  const fs::path test_path = a.test_out.empty()
                                 ? fs::path(base).replace_extension(".test.fgds")
                                 : fs::path(a.test_out);
  save_beats(train_path, split.train);
  save_beats(test_path, split.test);
  print_class_counts(split.train, "train");
  print_class_counts(split.test, "test");
  std::printf("wrote %s and %s\n", train_path.c_str(), test_path.c_str());
}

struct PartitionArgs {
  std::string in, shares = "0.50,0.49,0.01", out_prefix = "shard";
  std::uint64_t seed = 0;
};

void cmd_partition(const PartitionArgs& a) {
  const DatasetManifest train = load_beats(a.in);
  const auto shares = parse_share_list(a.shares);
  const auto shards = partition_clients(train, shares, a.seed);
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const std::string path = a.out_prefix + "_" + std::to_string(i) + ".fgds";
    save_beats(path, shards[i]);
    print_class_counts(shards[i], path.c_str());
  }
}

struct EncodeArgs {
  std::string in, out, method = "gasf", range = "-1,1", resize = "bilinear";
  int size = 32;
};

void cmd_encode(const EncodeArgs& a) {
  const EncodeConfig cfg = parse_encode_flags(a.method, a.range, a.resize, a.size);
  const DatasetManifest beats = load_beats(a.in);
  std::vector<GafImage> images;
  images.reserve(beats.beats.size());
  for (const BeatRecord& b : beats.beats) images.push_back(encode_beat(b, cfg));
  save_images(a.out, images);
  std::printf("encoded %zu beats to %dx%d images in %s\n", images.size(), a.size,
              a.size, a.out.c_str());
}

struct ServerArgs {
  std::string bind = "0.0.0.0:7700", config, test, train, out = "run";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

class ListenerAcceptor final : public ChannelAcceptor {
 public:
  explicit ListenerAcceptor(TcpListener& listener) : listener_(listener) {}
  std::unique_ptr<Channel> accept() override { return listener_.accept(); }

 private:
  TcpListener& listener_;
};

void cmd_server(const ServerArgs& a) {
  FederationConfig cfg = load_config(a.config);
  if (a.seed_set) cfg.seed = a.seed;
  const auto test = load_images(a.test);
  std::vector<GafImage> train;
  if (!a.train.empty()) train = load_images(a.train);

  const Endpoint ep = parse_endpoint(a.bind);
  TcpListener listener(ep.host, ep.port);
  std::printf("listening on %s:%u for %zu clients\n", ep.host.c_str(), listener.port(),
              cfg.clients.size());
  ListenerAcceptor acceptor(listener);

  CommStats stats;
  std::vector<RoundLog> rounds;
  ServerHooks hooks;
  hooks.stats = &stats;
  hooks.on_round = [&rounds](const RoundLog& log) {
    rounds.push_back(log);
    std::string clients;
    for (const auto& c : log.clients) clients += " " + c.id;
    std::printf("round %d done (clients:%s)\n", log.round, clients.c_str());
    std::fflush(stdout);
  };

  try {
    const RunOutcome outcome =
        run_server(cfg, acceptor, test, train.empty() ? nullptr : &train, hooks);
    write_run_dir(a.out, cfg, outcome);
    print_summary(outcome.report);
    std::printf("run written to %s\n", a.out.c_str());
  } catch (const Error& e) {
    write_partial_run_dir(a.out, cfg, e.what(), stats, rounds);
    throw;
  }
}

struct ClientArgs {
  std::string connect = "127.0.0.1:7700", shard, id, config;
};

void cmd_client(const ClientArgs& a) {
  const FederationConfig cfg = load_config(a.config);
  const auto shard = load_images(a.shard);
  const Endpoint ep = parse_endpoint(a.connect);
  auto channel = tcp_connect(ep.host, ep.port);
  run_client(cfg, *channel, a.id, shard);
  std::printf("client %s finished\n", a.id.c_str());
}

struct SimulateArgs {
  std::string config, shards, test, out = "run";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool no_train_eval = false;
};

void cmd_simulate(const SimulateArgs& a) {
  FederationConfig cfg = load_config(a.config);
  if (a.seed_set) cfg.seed = a.seed;
  const auto shard_paths = parse_name_list(a.shards);
  if (shard_paths.size() != cfg.clients.size()) {
    throw ConfigError("got " + std::to_string(shard_paths.size()) + " shards for " +
                      std::to_string(cfg.clients.size()) + " configured clients");
  }
  std::vector<std::vector<GafImage>> shards;
  std::vector<GafImage> train_union;
  for (const std::string& p : shard_paths) {
    shards.push_back(load_images(p));
    if (!a.no_train_eval) {
      train_union.insert(train_union.end(), shards.back().begin(), shards.back().end());
    }
  }
  const auto test = load_images(a.test);

  CommStats stats;
  std::vector<RoundLog> rounds;
  ServerHooks hooks;
  hooks.stats = &stats;
  hooks.on_round = [&rounds](const RoundLog& log) { rounds.push_back(log); };

  try {
    const RunOutcome outcome = simulate(cfg, shards, test,
                                        train_union.empty() ? nullptr : &train_union, hooks);
    write_run_dir(a.out, cfg, outcome);
    print_summary(outcome.report);
    std::printf("run written to %s\n", a.out.c_str());
  } catch (const Error& e) {
    write_partial_run_dir(a.out, cfg, e.what(), stats, rounds);
    throw;
  }
}

struct EvalArgs {
  std::string model, test;
};

void cmd_eval(const EvalArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.model);
  const auto test = load_images(a.test);
  const Evaluation ev = evaluate(ckpt.params, ckpt.spec, test);
  std::printf("test accuracy: %.4f (%llu/%llu)\n", ev.accuracy,
              static_cast<unsigned long long>(ev.matrix.trace()),
              static_cast<unsigned long long>(ev.matrix.total()));
  const auto per_class = per_class_accuracy(ev.matrix);
  const char* names = "NLRAV";
  for (int c = 0; c < kNumClasses; ++c) {
    if (per_class[c]) {
      std::printf("  class %c: %.4f\n", names[c], *per_class[c]);
    } else {
      std::printf("  class %c: n/a\n", names[c]);
    }
  }
}

struct ReportArgs {
  std::string run;
};

void cmd_report(const ReportArgs& a) {
  const fs::path dir(a.run);
  std::ifstream in(dir / "report.json", std::ios::binary);
  if (!in) throw IoError("no report.json under " + a.run);
  std::stringstream buf;
  buf << in.rdbuf();
  const RunReport report = report_from_json(buf.str());
  emit_report(report, dir);  // regenerate report.md (and report.json) in place
  std::fputs(report_to_markdown(report).c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated GAF-CNN heartbeat classification"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Extract labeled beats from WFDB records");
  ingest->add_option("--data-dir", ingest_args.data_dir, "Directory with .hea/.dat/.atr files")
      ->required();
  ingest->add_option("--out", ingest_args.out, "Output beat container");
  ingest->add_option("--window", ingest_args.window, "Beat window length (even)");
  ingest->add_option("--classes", ingest_args.classes, "Comma list of classes to keep");
  ingest->add_option("--max-per-class", ingest_args.max_per_class, "Cap per class (0 = unlimited)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic five-class dataset");
  synth->add_option("--per-class", synth_args.per_class, "Beats per class");
  synth->add_option("--window", synth_args.window, "Beat window length");
  synth->add_option("--seed", synth_args.seed, "RNG seed");
  synth->add_option("--noise", synth_args.noise, "Gaussian noise sigma");
  synth->add_option("--out", synth_args.out, "Output beat container");

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("--in", split_args.in, "Input beat container")->required();
  split->add_option("--train-frac", split_args.train_frac, "Training fraction");
  split->add_option("--seed", split_args.seed, "RNG seed");
  split->add_option("--train-out", split_args.train_out, "Train output path");
  split->add_option("--test-out", split_args.test_out, "Test output path");

  PartitionArgs partition_args;
  auto* partition = app.add_subcommand("partition", "Stratified client shards");
  partition->add_option("--in", partition_args.in, "Input beat container")->required();
  partition->add_option("--shares", partition_args.shares, "Comma list of shares summing to 1");
  partition->add_option("--seed", partition_args.seed, "RNG seed");
  partition->add_option("--out-prefix", partition_args.out_prefix, "Shard file prefix");

  EncodeArgs encode_args;
  auto* encode = app.add_subcommand("encode", "Encode beats as angular-field images");
  encode->add_option("--in", encode_args.in, "Input beat container")->required();
  encode->add_option("--out", encode_args.out, "Output image container")->required();
  encode->add_option("--method", encode_args.method, "gasf or gadf");
  encode->add_option("--range", encode_args.range, "Rescale range: '-1,1' or '0,1'");
  encode->add_option("--resize", encode_args.resize, "bilinear or paa");
  encode->add_option("--size", encode_args.size, "Output image side");

  ServerArgs server_args;
  auto* server = app.add_subcommand("server", "Run the aggregation server over TCP");
  server->add_option("--bind", server_args.bind, "host:port to listen on");
  server->add_option("--config", server_args.config, "Federation config JSON")->required();
  server->add_option("--test", server_args.test, "Test image container")->required();
  server->add_option("--train", server_args.train, "Optional train-union images for reporting");
  server->add_option("--out", server_args.out, "Run directory");
  server->add_option("--seed", server_args.seed, "Override the config seed")
      ->trigger_on_parse()
      ->each([&server_args](const std::string&) { server_args.seed_set = true; });

  ClientArgs client_args;
  auto* client = app.add_subcommand("client", "Run a training client over TCP");
  client->add_option("--connect", client_args.connect, "Server host:port");
  client->add_option("--shard", client_args.shard, "Shard image container")->required();
  client->add_option("--id", client_args.id, "Client id (must match the config)")->required();
  client->add_option("--config", client_args.config, "Federation config JSON")->required();

  SimulateArgs simulate_args;
  auto* sim = app.add_subcommand("simulate", "Single-process federated run over loopback");
  sim->add_option("--config", simulate_args.config, "Federation config JSON")->required();
  sim->add_option("--shards", simulate_args.shards, "Comma list of shard image containers")
      ->required();
  sim->add_option("--test", simulate_args.test, "Test image container")->required();
  sim->add_option("--out", simulate_args.out, "Run directory");
  sim->add_flag("--no-train-eval", simulate_args.no_train_eval,
                "Skip the train-union accuracy pass");
  sim->add_option("--seed", simulate_args.seed, "Override the config seed")
      ->trigger_on_parse()
      ->each([&simulate_args](const std::string&) { simulate_args.seed_set = true; });

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a test set");
  eval_cmd->add_option("--model", eval_args.model, "Checkpoint file")->required();
  eval_cmd->add_option("--test", eval_args.test, "Test image container")->required();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Regenerate a run report from report.json");
  report->add_option("--run", report_args.run, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  try {
    if (ingest->parsed()) cmd_ingest(ingest_args);
    if (synth->parsed()) cmd_synth(synth_args);
    if (split->parsed()) cmd_split(split_args);
    if (partition->parsed()) cmd_partition(partition_args);
    if (encode->parsed()) cmd_encode(encode_args);
    if (server->parsed()) cmd_server(server_args);
    if (client->parsed()) cmd_client(client_args);
    if (sim->parsed()) cmd_simulate(simulate_args);
    if (eval_cmd->parsed()) cmd_eval(eval_args);
    if (report->parsed()) cmd_report(report_args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
