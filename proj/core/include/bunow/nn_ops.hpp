#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "bunow/gemm.hpp"
#include "bunow/rng.hpp"
#include "bunow/tensor.hpp"

namespace bunow::nn {

enum class Mode { kTrain, kInfer };

namespace detail {

// Lays out every valid-padding window of one image as a column:
// col(ci*kh*kw + dy*kw + dx, y*ow + x) = img(ci, y+dy, x+dx).
template <typename T>
void im2col(const T* img, int cin, int h, int w, int kh, int kw, T* col) {
    const int oh = h - kh + 1;
    const int ow = w - kw + 1;
    T* dst = col;
    for (int ci = 0; ci < cin; ++ci) {
        const T* plane = img + static_cast<size_t>(ci) * h * w;
        for (int dy = 0; dy < kh; ++dy) {
            for (int dx = 0; dx < kw; ++dx) {
                for (int y = 0; y < oh; ++y) {
                    const T* src = plane + static_cast<size_t>(y + dy) * w + dx;
                    if (kw == 1) {
                        // stride-1 row copy
                        std::memcpy(dst, src, sizeof(T) * ow);
                    } else {
                        for (int x = 0; x < ow; ++x) dst[x] = src[x];
                    }
                    dst += ow;
                }
            }
        }
    }
}

// Transpose of im2col: scatter-adds column gradients back onto the image.
template <typename T>
void col2im_add(const T* col, int cin, int h, int w, int kh, int kw, T* img) {
    const int oh = h - kh + 1;
    const int ow = w - kw + 1;
    const T* src = col;
    for (int ci = 0; ci < cin; ++ci) {
        T* plane = img + static_cast<size_t>(ci) * h * w;
        for (int dy = 0; dy < kh; ++dy) {
            for (int dx = 0; dx < kw; ++dx) {
                for (int y = 0; y < oh; ++y) {
                    T* dst = plane + static_cast<size_t>(y + dy) * w + dx;
                    for (int x = 0; x < ow; ++x) dst[x] += src[x];
                    src += ow;
                }
            }
        }
    }
}

inline void check_conv_shapes(const std::vector<int>& in, const std::vector<int>& wt) {
    if (in.size() != 4 || wt.size() != 4) {
        throw std::invalid_argument("conv2d expects 4-d input and weight");
    }
    if (in[1] != wt[1]) throw std::invalid_argument("conv2d channel mismatch");
    if (wt[2] > in[2] || wt[3] > in[3]) {
        throw std::invalid_argument("kernel exceeds input extent");
    }
}

template <typename T>
std::vector<T>& conv_scratch() {
    thread_local std::vector<T> buf;
    return buf;
}

}  // namespace detail

// Valid-padding stride-1 2-D convolution.
// input (N,Cin,H,W), weight (Cout,Cin,kh,kw), bias (Cout)
// -> (N,Cout,H-kh+1,W-kw+1)
template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& input, const TensorT<T>& weight,
                          const TensorT<T>& bias) {
    detail::check_conv_shapes(input.shape(), weight.shape());
    const int n = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int cout = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
    if (bias.numel() != static_cast<size_t>(cout)) {
        throw std::invalid_argument("conv2d bias size mismatch");
    }
    const int oh = h - kh + 1, ow = w - kw + 1;
    const int kdim = cin * kh * kw;
    const int odim = oh * ow;

    TensorT<T> out({n, cout, oh, ow});
    const int nt = threads();
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && n > 1)
#endif
    for (int i = 0; i < n; ++i) {
        auto& col = detail::conv_scratch<T>();
        col.resize(static_cast<size_t>(kdim) * odim);
        detail::im2col(input.data() + static_cast<size_t>(i) * cin * h * w, cin, h, w, kh, kw,
                       col.data());
        T* out_i = out.data() + static_cast<size_t>(i) * cout * odim;
        gemm<T>(false, false, cout, odim, kdim, weight.data(), kdim, col.data(), odim, T{0},
                out_i, odim);
        for (int co = 0; co < cout; ++co) {
            const T b = bias[static_cast<size_t>(co)];
            T* row = out_i + static_cast<size_t>(co) * odim;
            for (int j = 0; j < odim; ++j) row[j] += b;
        }
    }
    return out;
}

template <typename T>
struct Conv2dGrads {
    TensorT<T> input;
    TensorT<T> weight;
    TensorT<T> bias;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const TensorT<T>& grad_out, const TensorT<T>& input,
                               const TensorT<T>& weight) {
    detail::check_conv_shapes(input.shape(), weight.shape());
    const int n = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int cout = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
    const int oh = h - kh + 1, ow = w - kw + 1;
    if (grad_out.shape() != std::vector<int>{n, cout, oh, ow}) {
        throw std::invalid_argument("conv2d_backward grad_out shape mismatch");
    }
    const int kdim = cin * kh * kw;
    const int odim = oh * ow;

    Conv2dGrads<T> g{TensorT<T>({n, cin, h, w}), TensorT<T>({cout, cin, kh, kw}),
                     TensorT<T>({cout})};

    // grad_bias: fixed n -> y -> x summation order
    for (int i = 0; i < n; ++i) {
        for (int co = 0; co < cout; ++co) {
            const T* row = grad_out.data() + (static_cast<size_t>(i) * cout + co) * odim;
            T acc = g.bias[static_cast<size_t>(co)];
            for (int j = 0; j < odim; ++j) acc += row[j];
            g.bias[static_cast<size_t>(co)] = acc;
        }
    }

    // grad_input: per image, W^T * grad_out scattered back through col2im
    const int nt = threads();
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && n > 1)
#endif
    for (int i = 0; i < n; ++i) {
        auto& colg = detail::conv_scratch<T>();
        colg.resize(static_cast<size_t>(kdim) * odim);
        const T* gout_i = grad_out.data() + static_cast<size_t>(i) * cout * odim;
        gemm<T>(true, false, kdim, odim, cout, weight.data(), kdim, gout_i, odim, T{0},
                colg.data(), odim);
        detail::col2im_add(colg.data(), cin, h, w, kh, kw,
                           g.input.data() + static_cast<size_t>(i) * cin * h * w);
    }

    // grad_weight: sequential accumulation over images keeps the summation
    // order independent of the thread count.
    {
        auto& col = detail::conv_scratch<T>();
        col.resize(static_cast<size_t>(kdim) * odim);
        for (int i = 0; i < n; ++i) {
            detail::im2col(input.data() + static_cast<size_t>(i) * cin * h * w, cin, h, w, kh,
                           kw, col.data());
            const T* gout_i = grad_out.data() + static_cast<size_t>(i) * cout * odim;
            gemm<T>(false, true, cout, kdim, odim, gout_i, odim, col.data(), odim, T{1},
                    g.weight.data(), kdim);
        }
    }
    return g;
}

template <typename T>
TensorT<T> relu_forward(const TensorT<T>& x) {
    TensorT<T> out = x;
    for (T& v : out.vec()) v = v > T{0} ? v : T{0};
    return out;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& grad_out, const TensorT<T>& x) {
    if (!grad_out.same_shape(x)) throw std::invalid_argument("relu_backward shape mismatch");
    TensorT<T> g = grad_out;
    const T* xv = x.data();
    T* gv = g.data();
    const size_t n = g.numel();
    for (size_t i = 0; i < n; ++i) {
        if (!(xv[i] > T{0})) gv[i] = T{0};  // subgradient at 0 is 0
    }
    return g;
}

template <typename T>
struct DropoutResult {
    TensorT<T> output;
    TensorT<T> mask;  // entries are 0 or 1/(1-rate); grad_in = grad_out * mask
};

// Inverted dropout: kept activations are scaled by 1/(1-rate) at train
// time so inference is a plain pass-through. Mask values are drawn from
// the stream in element order.
template <typename T>
DropoutResult<T> dropout_forward(const TensorT<T>& x, double rate, Mode mode, RngStream& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw std::invalid_argument("dropout rate must be in [0, 1)");
    }
    if (mode == Mode::kInfer) {
        return {x, TensorT<T>::full(x.shape(), T{1})};
    }
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    DropoutResult<T> r{TensorT<T>(x.shape()), TensorT<T>(x.shape())};
    const T* xv = x.data();
    T* ov = r.output.data();
    T* mv = r.mask.data();
    const size_t n = x.numel();
    for (size_t i = 0; i < n; ++i) {
        const bool keep = rng.next_double() >= rate;
        mv[i] = keep ? scale : T{0};
        ov[i] = keep ? xv[i] * scale : T{0};
    }
    return r;
}

template <typename T>
TensorT<T> dropout_backward(const TensorT<T>& grad_out, const TensorT<T>& mask) {
    if (!grad_out.same_shape(mask)) throw std::invalid_argument("dropout_backward shape mismatch");
    TensorT<T> g = grad_out;
    const T* mv = mask.data();
    T* gv = g.data();
    for (size_t i = 0; i < g.numel(); ++i) gv[i] *= mv[i];
    return g;
}

// x (N,Din) * weight (Din,Dout) + bias (Dout) -> (N,Dout)
template <typename T>
TensorT<T> dense_forward(const TensorT<T>& x, const TensorT<T>& weight, const TensorT<T>& bias) {
    if (x.rank() != 2 || weight.rank() != 2 || x.dim(1) != weight.dim(0) ||
        bias.numel() != static_cast<size_t>(weight.dim(1))) {
        throw std::invalid_argument("dense_forward shape mismatch");
    }
    const int n = x.dim(0), din = x.dim(1), dout = weight.dim(1);
    TensorT<T> out({n, dout});
    gemm<T>(false, false, n, dout, din, x.data(), din, weight.data(), dout, T{0}, out.data(),
            dout);
    for (int i = 0; i < n; ++i) {
        T* row = out.data() + static_cast<size_t>(i) * dout;
        for (int j = 0; j < dout; ++j) row[j] += bias[static_cast<size_t>(j)];
    }
    return out;
}

template <typename T>
struct DenseGrads {
    TensorT<T> input;
    TensorT<T> weight;
    TensorT<T> bias;
};

template <typename T>
DenseGrads<T> dense_backward(const TensorT<T>& grad_out, const TensorT<T>& x,
                             const TensorT<T>& weight) {
    const int n = x.dim(0), din = x.dim(1), dout = weight.dim(1);
    if (grad_out.shape() != std::vector<int>{n, dout}) {
        throw std::invalid_argument("dense_backward shape mismatch");
    }
    DenseGrads<T> g{TensorT<T>({n, din}), TensorT<T>({din, dout}), TensorT<T>({dout})};
    // grad_x = g * W^T
    gemm<T>(false, true, n, din, dout, grad_out.data(), dout, weight.data(), dout, T{0},
            g.input.data(), din);
    // grad_W = x^T * g
    gemm<T>(true, false, din, dout, n, x.data(), din, grad_out.data(), dout, T{0},
            g.weight.data(), dout);
    for (int i = 0; i < n; ++i) {
        const T* row = grad_out.data() + static_cast<size_t>(i) * dout;
        for (int j = 0; j < dout; ++j) g.bias[static_cast<size_t>(j)] += row[j];
    }
    return g;
}

template <typename T>
struct SoftmaxXentResult {
    double loss = 0.0;           // mean over the batch
    TensorT<T> grad_logits;      // (softmax - onehot) / N
    TensorT<T> probs;
};

template <typename T>
SoftmaxXentResult<T> softmax_cross_entropy(const TensorT<T>& logits,
                                           const std::vector<int>& labels) {
    if (logits.rank() != 2 || labels.size() != static_cast<size_t>(logits.dim(0))) {
        throw std::invalid_argument("softmax_cross_entropy shape mismatch");
    }
    const int n = logits.dim(0), c = logits.dim(1);
    SoftmaxXentResult<T> r{0.0, TensorT<T>({n, c}), TensorT<T>({n, c})};
    double loss_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const int label = labels[static_cast<size_t>(i)];
        if (label < 0 || label >= c) throw std::invalid_argument("label out of range");
        const T* row = logits.data() + static_cast<size_t>(i) * c;
        T* prow = r.probs.data() + static_cast<size_t>(i) * c;
        T* grow = r.grad_logits.data() + static_cast<size_t>(i) * c;

        T mx = row[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (int j = 0; j < c; ++j) {
            const double e = std::exp(static_cast<double>(row[j] - mx));
            prow[j] = static_cast<T>(e);
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (int j = 0; j < c; ++j) {
            prow[j] = static_cast<T>(static_cast<double>(prow[j]) * inv);
            grow[j] = static_cast<T>(static_cast<double>(prow[j]) / n);
        }
        grow[label] -= static_cast<T>(1.0 / n);
        loss_sum += -(static_cast<double>(row[label] - mx) - std::log(sum));
    }
    r.loss = loss_sum / n;
    return r;
}

template <typename T>
TensorT<T> softmax(const TensorT<T>& logits) {
    if (logits.rank() != 2) throw std::invalid_argument("softmax expects a 2-d tensor");
    const int n = logits.dim(0), c = logits.dim(1);
    TensorT<T> probs({n, c});
    for (int i = 0; i < n; ++i) {
        const T* row = logits.data() + static_cast<size_t>(i) * c;
        T* prow = probs.data() + static_cast<size_t>(i) * c;
        T mx = row[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (int j = 0; j < c; ++j) {
            const double e = std::exp(static_cast<double>(row[j] - mx));
            prow[j] = static_cast<T>(e);
            sum += e;
        }
        for (int j = 0; j < c; ++j) {
            prow[j] = static_cast<T>(static_cast<double>(prow[j]) / sum);
        }
    }
    return probs;
}

// Uniform on [-a, a] with a = sqrt(6 / (fan_in + fan_out)). Conv layers
// pass receptive-field-scaled fans (Cin*kh*kw / Cout*kh*kw).
template <typename T>
TensorT<T> xavier_uniform(std::vector<int> shape, int fan_in, int fan_out, RngStream& rng) {
    if (fan_in <= 0 || fan_out <= 0) throw std::invalid_argument("fans must be positive");
    const double a = std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
    TensorT<T> t(std::move(shape));
    for (T& v : t.vec()) v = static_cast<T>(rng.uniform(-a, a));
    return t;
}

}  // namespace bunow::nn
