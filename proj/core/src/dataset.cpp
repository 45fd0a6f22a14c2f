#include "fedgaf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedgaf/errors.hpp"
#include "fedgaf/rng.hpp"

namespace fedgaf {

std::vector<std::size_t> largest_remainder(const std::vector<double>& quotas,
                                           std::size_t total) {
  std::vector<std::size_t> counts(quotas.size());
  std::vector<std::pair<double, std::size_t>> remainders;  // (-frac, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < quotas.size(); ++i) {
    const double q = std::max(0.0, quotas[i]);
    counts[i] = static_cast<std::size_t>(std::floor(q));
    assigned += counts[i];
    remainders.emplace_back(-(q - std::floor(q)), i);
  }
  if (assigned > total) throw ConfigError("quota floors exceed the total");
  std::stable_sort(remainders.begin(), remainders.end());  // ties keep lower index first
  std::size_t left = total - assigned;
  for (std::size_t k = 0; left > 0; k = (k + 1) % remainders.size(), --left) {
    counts[remainders[k].second] += 1;
  }
  return counts;
}

namespace {

// Per-class beat indices, each list seeded-shuffled.
std::array<std::vector<std::size_t>, kNumClasses> shuffled_class_indices(
    const DatasetManifest& m, std::uint64_t seed, std::uint64_t tag) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < m.beats.size(); ++i) {
    by_class[static_cast<int>(m.beats[i].label)].push_back(i);
  }
  for (int c = 0; c < kNumClasses; ++c) {
    Rng rng(mix_seed(seed, tag, static_cast<std::uint64_t>(c)));
    rng.shuffle(by_class[c]);
  }
  return by_class;
}

}  // namespace

SplitResult split_train_test(const DatasetManifest& beats, double train_fraction,
                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must be strictly between 0 and 1");
  }
  auto by_class = shuffled_class_indices(beats, seed, 0x73706c69ULL /* "spli" */);
  for (int c = 0; c < kNumClasses; ++c) {
    if (by_class[c].empty()) {
      throw ConfigError(std::string("class ") + label_char(static_cast<BeatLabel>(c)) +
                        " has no beats; all five classes must be present");
    }
  }

  // The train total is the largest-remainder rounding of total*fraction over
  // the two sides; per-class counts are then apportioned the same way.
  const std::size_t total = beats.beats.size();
  const auto side_counts = largest_remainder(
      {train_fraction * static_cast<double>(total),
       (1.0 - train_fraction) * static_cast<double>(total)},
      total);
  std::vector<double> class_quotas;
  for (int c = 0; c < kNumClasses; ++c) {
    class_quotas.push_back(train_fraction * static_cast<double>(by_class[c].size()));
  }
  auto train_per_class = largest_remainder(class_quotas, side_counts[0]);
  for (int c = 0; c < kNumClasses; ++c) {
    // Apportionment can theoretically round a class above its population;
    // clamp and push the slack to the next class.
    if (train_per_class[c] > by_class[c].size()) {
      std::size_t slack = train_per_class[c] - by_class[c].size();
      train_per_class[c] = by_class[c].size();
      for (int d = 0; d < kNumClasses && slack > 0; ++d) {
        const std::size_t room = by_class[d].size() - train_per_class[d];
        const std::size_t add = std::min(room, slack);
        train_per_class[d] += add;
        slack -= add;
      }
    }
  }

  SplitResult out;
  out.train.window = beats.window;
  out.test.window = beats.window;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& idx = by_class[c];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      (k < train_per_class[c] ? out.train : out.test).beats.push_back(beats.beats[idx[k]]);
    }
  }
  return out;
}

std::vector<DatasetManifest> partition_clients(const DatasetManifest& train,
                                               const std::vector<double>& shares,
                                               std::uint64_t seed) {
  if (shares.empty()) throw ConfigError("need at least one share");
  double sum = 0.0;
  for (double s : shares) {
    if (s <= 0.0) throw ConfigError("shares must be positive");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("shares must sum to 1");

  auto by_class = shuffled_class_indices(train, seed, 0x70617274ULL /* "part" */);

  std::vector<DatasetManifest> shards(shares.size());
  for (auto& s : shards) s.window = train.window;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& idx = by_class[c];
    std::vector<double> quotas;
    for (double s : shares) quotas.push_back(s * static_cast<double>(idx.size()));
    const auto counts = largest_remainder(quotas, idx.size());
    std::size_t cursor = 0;
    for (std::size_t shard = 0; shard < shares.size(); ++shard) {
      for (std::size_t k = 0; k < counts[shard]; ++k, ++cursor) {
        shards[shard].beats.push_back(train.beats[idx[cursor]]);
      }
    }
  }
  return shards;
}

DatasetManifest synth_dataset(int num_classes, int per_class, int window,
                              std::uint64_t seed, double noise_sigma) {
  if (num_classes != kNumClasses) {
    throw ConfigError("synthetic generator produces exactly five classes");
  }
  if (per_class < 1) throw ConfigError("per-class count must be at least 1");
  if (window < 2) throw ConfigError("window too small");

  DatasetManifest m;
  m.window = static_cast<std::uint16_t>(window);
  Rng rng(mix_seed(seed, 0x73796e74ULL /* "synt" */));
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int c = 0; c < num_classes; ++c) {
    const double freq = 2.0 + 0.05 * static_cast<double>(c);  // cycles per window
    for (int k = 0; k < per_class; ++k) {
      BeatRecord b;
      b.label = static_cast<BeatLabel>(c);
      b.record_name = "synth";
      b.r_peak_index = static_cast<std::uint32_t>(window / 2);
      b.samples.reserve(static_cast<std::size_t>(window));
      for (int i = 0; i < window; ++i) {
        const double base = std::sin(two_pi * freq * i / window);
        const double noise = noise_sigma > 0.0 ? noise_sigma * rng.gaussian() : 0.0;
        b.samples.push_back(static_cast<float>(base + noise));
      }
      m.beats.push_back(std::move(b));
    }
  }
  return m;
}

}  // namespace fedgaf
