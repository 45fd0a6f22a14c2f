#include "fedgaf/eval/metrics.hpp"

#include "fedgaf/errors.hpp"
#include "fedgaf/nn/net.hpp"
#include "fedgaf/nn/train.hpp"

namespace fedgaf {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (std::uint64_t v : row) n += v;
  }
  return n;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t n = 0;
  for (int i = 0; i < kNumClasses; ++i) n += counts[i][i];
  return n;
}

double ConfusionMatrix::overall_accuracy() const {
  const std::uint64_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(t);
}

Evaluation evaluate(const ModelParams& params, const ModelSpec& spec,
                    const std::vector<GafImage>& test) {
  if (test.empty()) throw ConfigError("cannot evaluate on an empty test set");
  Evaluation ev;
  for (const GafImage& img : test) {
    const Tensor logits = net_forward(params, spec, image_tensor(img));
    std::size_t pred = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
      if (logits.data[i] > logits.data[pred]) pred = i;
    }
    const auto truth = static_cast<std::size_t>(img.label);
    if (pred >= kNumClasses) throw ShapeError("prediction outside the class range");
    ev.matrix.counts[truth][pred] += 1;
  }
  ev.accuracy = ev.matrix.overall_accuracy();
  return ev;
}

std::array<std::optional<double>, kNumClasses> per_class_accuracy(
    const ConfusionMatrix& m) {
  std::array<std::optional<double>, kNumClasses> out;
  for (int c = 0; c < kNumClasses; ++c) {
    std::uint64_t row = 0;
    for (std::uint64_t v : m.counts[c]) row += v;
    if (row > 0) {
      out[c] = static_cast<double>(m.counts[c][c]) / static_cast<double>(row);
    }
  }
  return out;
}

}  // namespace fedgaf
