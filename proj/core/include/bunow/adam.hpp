#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bunow/tensor.hpp"

namespace bunow::nn {

// Moment buffers for one parameter list. m/v are allocated lazily on the
// first step so a fresh state can be declared next to the model.
template <typename T>
struct AdamStateT {
    double lr = 0.0005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long long t = 0;
    std::vector<TensorT<T>> m;
    std::vector<TensorT<T>> v;
};

using AdamState = AdamStateT<float>;

// One Adam update over a parameter list:
//   m = b1*m + (1-b1)*g, v = b2*v + (1-b2)*g^2
//   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename T>
void adam_step(const std::vector<TensorT<T>*>& params, const std::vector<TensorT<T>>& grads,
               AdamStateT<T>& state) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step parameter/gradient count mismatch");
    }
    if (state.m.empty()) {
        for (const TensorT<T>* p : params) {
            state.m.emplace_back(p->shape());
            state.v.emplace_back(p->shape());
        }
    }
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step state size mismatch");
    }

    state.t += 1;
    const T b1 = static_cast<T>(state.beta1);
    const T b2 = static_cast<T>(state.beta2);
    const T inv_bc1 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta1, state.t)));
    const T inv_bc2 = static_cast<T>(1.0 / (1.0 - std::pow(state.beta2, state.t)));
    const T lr = static_cast<T>(state.lr);
    const T eps = static_cast<T>(state.epsilon);

    for (size_t pi = 0; pi < params.size(); ++pi) {
        TensorT<T>& p = *params[pi];
        const TensorT<T>& g = grads[pi];
        if (!p.same_shape(g) || !p.same_shape(state.m[pi])) {
            throw std::invalid_argument("adam_step shape mismatch");
        }
        T* pv = p.data();
        const T* gv = g.data();
        T* mv = state.m[pi].data();
        T* vv = state.v[pi].data();
        const size_t n = p.numel();
        for (size_t i = 0; i < n; ++i) {
            const T gi = gv[i];
            mv[i] = b1 * mv[i] + (T{1} - b1) * gi;
            vv[i] = b2 * vv[i] + (T{1} - b2) * gi * gi;
            const T mhat = mv[i] * inv_bc1;
            const T vhat = vv[i] * inv_bc2;
            pv[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

}  // namespace bunow::nn
