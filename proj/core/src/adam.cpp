#include "sdm/adam.hpp"

#include <cmath>
#include <string>

#include "sdm/errors.hpp"

namespace sdm {

AdamState make_adam(const MlpNet& net, double lr) {
    AdamState st;
    st.lr = lr;
    for (const Layer& layer : net.layers) {
        st.mW.emplace_back(layer.out_dim(), layer.in_dim());
        st.vW.emplace_back(layer.out_dim(), layer.in_dim());
        st.mb.emplace_back(layer.out_dim(), 0.0);
        st.vb.emplace_back(layer.out_dim(), 0.0);
    }
    return st;
}

void adam_step(AdamState& state, MlpNet& net, const Gradients& grads) {
    if (state.mW.size() != net.layers.size() || grads.gW.size() != net.layers.size()) {
        throw ShapeError("adam_step: state/grads layer count mismatch");
    }
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        for (double g : grads.gW[k].data) {
            if (!std::isfinite(g)) {
                throw NumericError("adam_step: non-finite weight gradient in layer " +
                                   std::to_string(k));
            }
        }
        for (double g : grads.gb[k]) {
            if (!std::isfinite(g)) {
                throw NumericError("adam_step: non-finite bias gradient in layer " +
                                   std::to_string(k));
            }
        }
    }

    state.step += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        Layer& layer = net.layers[k];
        Tensor2& mW = state.mW[k];
        Tensor2& vW = state.vW[k];
        const Tensor2& gW = grads.gW[k];
        if (!mW.same_shape(gW) || !mW.same_shape(layer.W)) {
            throw ShapeError("adam_step: weight shape mismatch in layer " + std::to_string(k));
        }
        for (std::size_t i = 0; i < layer.W.data.size(); ++i) {
            const double g = gW.data[i];
            mW.data[i] = state.beta1 * mW.data[i] + (1.0 - state.beta1) * g;
            vW.data[i] = state.beta2 * vW.data[i] + (1.0 - state.beta2) * g * g;
            layer.W.data[i] -=
                state.lr * (mW.data[i] / c1) / (std::sqrt(vW.data[i] / c2) + state.eps);
        }
        auto& mb = state.mb[k];
        auto& vb = state.vb[k];
        const auto& gb = grads.gb[k];
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
            const double g = gb[i];
            mb[i] = state.beta1 * mb[i] + (1.0 - state.beta1) * g;
            vb[i] = state.beta2 * vb[i] + (1.0 - state.beta2) * g * g;
            layer.b[i] -= state.lr * (mb[i] / c1) / (std::sqrt(vb[i] / c2) + state.eps);
        }
    }
    net.version += 1;
}

} // namespace sdm
