#pragma once

#include <cstdint>
#include <vector>

#include "fedgaf/beat.hpp"

namespace fedgaf {

// Integer apportionment by the largest-remainder rule: floor every quota,
// then hand the remaining units to the largest fractional remainders, ties
// broken toward the lower index. The quotas are expected to sum to total.
std::vector<std::size_t> largest_remainder(const std::vector<double>& quotas,
                                           std::size_t total);

struct SplitResult {
  DatasetManifest train;
  DatasetManifest test;
};

// Stratified seeded train/test split. Per class the beats are shuffled and
// allocated so that the train total equals the largest-remainder rounding of
// total * train_fraction. All five classes must be present.
SplitResult split_train_test(const DatasetManifest& beats, double train_fraction,
                             std::uint64_t seed);

// Stratified seeded partition into one shard per share. Shares must be
// positive and sum to 1 (within 1e-9). Per class, counts are apportioned by
// largest remainder; every beat lands in exactly one shard.
std::vector<DatasetManifest> partition_clients(const DatasetManifest& train,
                                               const std::vector<double>& shares,
                                               std::uint64_t seed);

// Desk-scale synthetic generator: class k beats are sinusoids of
// class-dependent frequency plus seeded Gaussian noise with sigma =
// noise_sigma of the unit amplitude. Classes stay separable; zero noise makes
// each class's beats identical.
DatasetManifest synth_dataset(int num_classes, int per_class, int window,
                              std::uint64_t seed, double noise_sigma = 0.1);

}  // namespace fedgaf
