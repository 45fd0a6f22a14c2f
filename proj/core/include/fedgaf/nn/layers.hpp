#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fedgaf/tensor.hpp"

namespace fedgaf {

namespace detail {

// Copies a (C,H,W) tensor into a zero-padded (C,H+2p,W+2p) buffer so the
// convolution inner loops run branch-free over contiguous rows.
template <class T>
std::vector<T> pad_channels(const T* src, std::size_t channels, std::size_t h,
                            std::size_t w, std::size_t pad) {
  const std::size_t ph = h + 2 * pad, pw = w + 2 * pad;
  std::vector<T> out(channels * ph * pw, T{});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      const T* in_row = src + (c * h + y) * w;
      T* out_row = out.data() + (c * ph + y + pad) * pw + pad;
      std::copy(in_row, in_row + w, out_row);
    }
  }
  return out;
}

// Dot product with four independent accumulators; fixed summation order,
// shorter dependency chains than a single running sum.
template <class T>
T dot4(const T* a, const T* b, std::size_t n) {
  T s0{}, s1{}, s2{}, s3{};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

// Stride-1 cross-correlation with symmetric zero padding plus per-channel
// bias. input (C_in,H,W), kernels (C_out,C_in,k,k) with k odd, bias (C_out);
// pad must equal (k-1)/2 so the spatial size is preserved.
template <class T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                      const BasicTensor<T>& bias, std::size_t pad) {
  if (input.shape.size() != 3 || kernels.shape.size() != 4 || bias.shape.size() != 1) {
    throw ShapeError("conv2d: expected input (C,H,W), kernels (O,C,k,k), bias (O)");
  }
  const std::size_t cin = input.shape[0], h = input.shape[1], w = input.shape[2];
  const std::size_t cout = kernels.shape[0], k = kernels.shape[2];
  if (kernels.shape[1] != cin || kernels.shape[3] != k) {
    throw ShapeError("conv2d: kernel shape mismatch, got " + shape_string(kernels.shape));
  }
  if (k % 2 == 0 || pad != (k - 1) / 2) {
    throw ShapeError("conv2d: kernel size must be odd with pad = (k-1)/2");
  }
  if (bias.shape[0] != cout) throw ShapeError("conv2d: bias size mismatch");

  const std::vector<T> padded = detail::pad_channels(input.data.data(), cin, h, w, pad);
  const std::size_t pw = w + 2 * pad;

  BasicTensor<T> out({cout, h, w});
  for (std::size_t co = 0; co < cout; ++co) {
    T* out_c = out.data.data() + co * h * w;
    std::fill(out_c, out_c + h * w, bias.data[co]);
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const T* in_c = padded.data() + ci * (h + 2 * pad) * pw;
      const T* ker = kernels.data.data() + (co * cin + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const T wv = ker[ky * k + kx];
          for (std::size_t y = 0; y < h; ++y) {
            const T* in_row = in_c + (y + ky) * pw + kx;
            T* out_row = out_c + y * w;
            for (std::size_t x = 0; x < w; ++x) out_row[x] += wv * in_row[x];
          }
        }
      }
    }
  }
  return out;
}

template <class T>
struct Conv2dGrads {
  BasicTensor<T> input;
  BasicTensor<T> kernels;
  BasicTensor<T> bias;
};

template <class T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input,
                               const BasicTensor<T>& kernels,
                               const BasicTensor<T>& grad_out, std::size_t pad) {
  const std::size_t cin = input.shape[0], h = input.shape[1], w = input.shape[2];
  const std::size_t cout = kernels.shape[0], k = kernels.shape[2];
  if (grad_out.shape != std::vector<std::size_t>{cout, h, w}) {
    throw ShapeError("conv2d_backward: grad shape mismatch, got " +
                     shape_string(grad_out.shape));
  }
  const std::size_t ph = h + 2 * pad, pw = w + 2 * pad;
  const std::vector<T> padded = detail::pad_channels(input.data.data(), cin, h, w, pad);

  Conv2dGrads<T> g{BasicTensor<T>(input.shape), BasicTensor<T>(kernels.shape),
                   BasicTensor<T>(std::vector<std::size_t>{cout})};

  // bias: plain sums over each output channel
  for (std::size_t co = 0; co < cout; ++co) {
    const T* go = grad_out.data.data() + co * h * w;
    T s{};
    for (std::size_t i = 0; i < h * w; ++i) s += go[i];
    g.bias.data[co] = s;
  }

  // kernels: correlation of the padded input with grad_out
  for (std::size_t co = 0; co < cout; ++co) {
    const T* go_c = grad_out.data.data() + co * h * w;
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const T* in_c = padded.data() + ci * ph * pw;
      T* dk = g.kernels.data.data() + (co * cin + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          T s{};
          for (std::size_t y = 0; y < h; ++y) {
            s += detail::dot4(go_c + y * w, in_c + (y + ky) * pw + kx, w);
          }
          dk[ky * k + kx] = s;
        }
      }
    }
  }

  // input: scatter grad_out through the kernels into a padded buffer
  std::vector<T> dpad(cin * ph * pw, T{});
  for (std::size_t co = 0; co < cout; ++co) {
    const T* go_c = grad_out.data.data() + co * h * w;
    for (std::size_t ci = 0; ci < cin; ++ci) {
      T* dp_c = dpad.data() + ci * ph * pw;
      const T* ker = kernels.data.data() + (co * cin + ci) * k * k;
      for (std::size_t ky = 0; ky < k; ++ky) {
        for (std::size_t kx = 0; kx < k; ++kx) {
          const T wv = ker[ky * k + kx];
          for (std::size_t y = 0; y < h; ++y) {
            T* dp_row = dp_c + (y + ky) * pw + kx;
            const T* go_row = go_c + y * w;
            for (std::size_t x = 0; x < w; ++x) dp_row[x] += wv * go_row[x];
          }
        }
      }
    }
  }
  for (std::size_t ci = 0; ci < cin; ++ci) {
    for (std::size_t y = 0; y < h; ++y) {
      const T* dp_row = dpad.data() + (ci * ph + y + pad) * pw + pad;
      T* di_row = g.input.data.data() + (ci * h + y) * w;
      std::copy(dp_row, dp_row + w, di_row);
    }
  }
  return g;
}

// Elementwise max(x, alpha*x). Gradient is 1 for x > 0 and alpha otherwise
// (the tie at x == 0 takes the alpha branch).
template <class T>
BasicTensor<T> leaky_relu(const BasicTensor<T>& x, T alpha) {
  BasicTensor<T> out;
  out.shape = x.shape;
  out.data.resize(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const T v = x.data[i];
    out.data[i] = v > T{} ? v : alpha * v;
  }
  return out;
}

template <class T>
BasicTensor<T> leaky_relu_backward(const BasicTensor<T>& x, T alpha,
                                   const BasicTensor<T>& grad_out) {
  if (!x.same_shape(grad_out)) throw ShapeError("leaky_relu_backward: shape mismatch");
  BasicTensor<T> out;
  out.shape = x.shape;
  out.data.resize(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    out.data[i] = grad_out.data[i] * (x.data[i] > T{} ? T{1} : alpha);
  }
  return out;
}

// 2x2 max pooling with stride 2. H and W must be even. When argmax is given
// it receives, per output cell, the flat input index of the first maximal
// element in row-major block order; the backward pass routes gradient there.
template <class T>
BasicTensor<T> maxpool2d(const BasicTensor<T>& input,
                         std::vector<std::uint32_t>* argmax = nullptr) {
  if (input.shape.size() != 3) throw ShapeError("maxpool2d: expected (C,H,W)");
  const std::size_t c = input.shape[0], h = input.shape[1], w = input.shape[2];
  if (h % 2 != 0 || w % 2 != 0) throw ShapeError("maxpool2d: H and W must be even");
  const std::size_t oh = h / 2, ow = w / 2;
  BasicTensor<T> out({c, oh, ow});
  if (argmax) argmax->assign(c * oh * ow, 0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        const std::size_t base = (ch * h + 2 * y) * w + 2 * x;
        std::size_t best = base;
        T best_v = input.data[base];
        const std::size_t candidates[3] = {base + 1, base + w, base + w + 1};
        for (std::size_t idx : candidates) {
          if (input.data[idx] > best_v) {  // strict: first max wins ties
            best_v = input.data[idx];
            best = idx;
          }
        }
        const std::size_t o = (ch * oh + y) * ow + x;
        out.data[o] = best_v;
        if (argmax) (*argmax)[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return out;
}

template <class T>
BasicTensor<T> maxpool2d_backward(const std::vector<std::size_t>& input_shape,
                                  const std::vector<std::uint32_t>& argmax,
                                  const BasicTensor<T>& grad_out) {
  if (argmax.size() != grad_out.data.size()) {
    throw ShapeError("maxpool2d_backward: argmax/grad size mismatch");
  }
  BasicTensor<T> out(input_shape);
  for (std::size_t i = 0; i < grad_out.data.size(); ++i) {
    out.data[argmax[i]] += grad_out.data[i];
  }
  return out;
}

// Fully connected layer: y = W x + b with W of shape (out, in).
template <class T>
BasicTensor<T> dense(const BasicTensor<T>& x, const BasicTensor<T>& weights,
                     const BasicTensor<T>& bias) {
  if (weights.shape.size() != 2) throw ShapeError("dense: weights must be (out, in)");
  const std::size_t out_n = weights.shape[0], in_n = weights.shape[1];
  if (x.size() != in_n) {
    throw ShapeError("dense: input size " + std::to_string(x.size()) +
                     " does not match weights " + shape_string(weights.shape));
  }
  if (bias.size() != out_n) throw ShapeError("dense: bias size mismatch");
  BasicTensor<T> y({out_n});
  for (std::size_t o = 0; o < out_n; ++o) {
    y.data[o] = bias.data[o] + detail::dot4(weights.data.data() + o * in_n,
                                            x.data.data(), in_n);
  }
  return y;
}

template <class T>
struct DenseGrads {
  BasicTensor<T> input;
  BasicTensor<T> weights;
  BasicTensor<T> bias;
};

template <class T>
DenseGrads<T> dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& weights,
                             const BasicTensor<T>& grad_out) {
  const std::size_t out_n = weights.shape[0], in_n = weights.shape[1];
  if (grad_out.size() != out_n) throw ShapeError("dense_backward: grad size mismatch");
  DenseGrads<T> g{BasicTensor<T>({in_n}), BasicTensor<T>(weights.shape),
                  BasicTensor<T>({out_n})};
  g.bias.data = grad_out.data;
  for (std::size_t o = 0; o < out_n; ++o) {
    const T go = grad_out.data[o];
    const T* w_row = weights.data.data() + o * in_n;
    T* dw_row = g.weights.data.data() + o * in_n;
    T* dx = g.input.data.data();
    for (std::size_t i = 0; i < in_n; ++i) {
      dw_row[i] = go * x.data[i];
      dx[i] += go * w_row[i];
    }
  }
  return g;
}

template <class T>
struct SoftmaxLoss {
  T loss{};
  BasicTensor<T> grad;  // d loss / d logits
};

// Cross-entropy on softmax probabilities with max-subtraction stabilization.
// grad = softmax(logits) - onehot(label).
template <class T>
SoftmaxLoss<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::size_t label) {
  const std::size_t n = logits.size();
  if (label >= n) throw ShapeError("softmax_cross_entropy: label out of range");
  T max_v = logits.data[0];
  for (const T& v : logits.data) max_v = std::max(max_v, v);
  T sum{};
  SoftmaxLoss<T> out;
  out.grad.shape = {n};
  out.grad.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T e = std::exp(logits.data[i] - max_v);
    out.grad.data[i] = e;
    sum += e;
  }
  for (std::size_t i = 0; i < n; ++i) out.grad.data[i] /= sum;
  out.loss = -(logits.data[label] - max_v - std::log(sum));
  out.grad.data[label] -= T{1};
  return out;
}

}  // namespace fedgaf
