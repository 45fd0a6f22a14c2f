#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fedgaf/beat.hpp"
#include "fedgaf/gaf.hpp"
#include "fedgaf/nn/model.hpp"

namespace fedgaf {

// 5x5 count table: rows are true classes (N,L,R,A,V order), columns the
// predicted ones.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t trace() const;
  double overall_accuracy() const;  // trace / total

  bool operator==(const ConfusionMatrix&) const = default;
};

struct Evaluation {
  ConfusionMatrix matrix;
  double accuracy = 0.0;
};

// Argmax classification over the test set (first maximal logit wins ties).
// The matrix total equals the test size. Empty test set is a ConfigError.
Evaluation evaluate(const ModelParams& params, const ModelSpec& spec,
                    const std::vector<GafImage>& test);

// Per-class recall: diagonal over the true-class row sum. A class with no
// test examples reports nullopt rather than zero.
std::array<std::optional<double>, kNumClasses> per_class_accuracy(
    const ConfusionMatrix& m);

}  // namespace fedgaf
