#pragma once

#include <cstdint>
#include <vector>

#include "sdm/rng.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

enum class Activation { SiLU, ReLU, Identity };

struct Layer {
    Tensor2 W; // out x in
    std::vector<double> b;
    Activation act = Activation::Identity;

    std::size_t in_dim() const { return W.cols; }
    std::size_t out_dim() const { return W.rows; }
};

struct MlpNet {
    std::vector<Layer> layers;
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    // bumped on every parameter mutation so stale forward caches are detectable
    std::uint64_t version = 0;
};

struct ForwardCache {
    std::vector<Tensor2> xs; // layer inputs, xs[0] = net input, size L+1
    std::vector<Tensor2> zs; // pre-activations, size L
    const MlpNet* net = nullptr;
    std::uint64_t net_version = 0;
};

struct Gradients {
    std::vector<Tensor2> gW;
    std::vector<std::vector<double>> gb;
    Tensor2 gx; // gradient w.r.t. the forward input
};

// Hidden layers get `hidden_act`, the final layer is always Identity.
MlpNet make_mlp(const std::vector<std::size_t>& dims, Rng& rng,
                Activation hidden_act = Activation::SiLU);

// Dim chaining + final-Identity check; throws ShapeError / ConfigError.
void validate_net(const MlpNet& net);

Tensor2 mlp_forward(const MlpNet& net, const Tensor2& input, ForwardCache* cache = nullptr);

Gradients mlp_backward(const MlpNet& net, const ForwardCache& cache, const Tensor2& grad_output);

Gradients zero_gradients(const MlpNet& net);
void accumulate(Gradients& into, const Gradients& g);

std::size_t param_count(const MlpNet& net);

double silu(double x);
double silu_derivative(double x);

} // namespace sdm
