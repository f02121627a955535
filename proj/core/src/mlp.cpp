#include "sdm/mlp.hpp"

#include <cmath>
#include <string>

#include "sdm/errors.hpp"

namespace sdm {

double silu(double x) {
    return x / (1.0 + std::exp(-x));
}

double silu_derivative(double x) {
    double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

MlpNet make_mlp(const std::vector<std::size_t>& dims, Rng& rng, Activation hidden_act) {
    if (dims.size() < 2) throw ConfigError("make_mlp: need at least input and output dims");
    MlpNet net;
    net.input_dim = dims.front();
    net.output_dim = dims.back();
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        Layer layer;
        layer.W = Tensor2(dims[k + 1], dims[k]);
        layer.b.assign(dims[k + 1], 0.0);
        layer.act = (k + 2 == dims.size()) ? Activation::Identity : hidden_act;
        double bound = std::sqrt(6.0 / static_cast<double>(dims[k]));
        for (double& w : layer.W.data) w = rng.uniform(-bound, bound);
        net.layers.push_back(std::move(layer));
    }
    validate_net(net);
    return net;
}

void validate_net(const MlpNet& net) {
    if (net.layers.empty()) throw ConfigError("net has no layers");
    if (net.layers.front().in_dim() != net.input_dim) {
        throw ShapeError("net input_dim " + std::to_string(net.input_dim) +
                         " != first layer in dim " + std::to_string(net.layers.front().in_dim()));
    }
    if (net.layers.back().out_dim() != net.output_dim) {
        throw ShapeError("net output_dim " + std::to_string(net.output_dim) +
                         " != last layer out dim " + std::to_string(net.layers.back().out_dim()));
    }
    for (std::size_t k = 0; k + 1 < net.layers.size(); ++k) {
        if (net.layers[k].out_dim() != net.layers[k + 1].in_dim()) {
            throw ShapeError("layer " + std::to_string(k) + " out dim " +
                             std::to_string(net.layers[k].out_dim()) + " != layer " +
                             std::to_string(k + 1) + " in dim " +
                             std::to_string(net.layers[k + 1].in_dim()));
        }
        if (net.layers[k].b.size() != net.layers[k].out_dim()) {
            throw ShapeError("layer " + std::to_string(k) + " bias size mismatch");
        }
    }
    if (net.layers.back().act != Activation::Identity) {
        throw ConfigError("final layer activation must be identity");
    }
}

namespace {
double apply_act(Activation act, double z) {
    switch (act) {
        case Activation::SiLU: return silu(z);
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Identity: return z;
    }
    return z;
}

double act_derivative(Activation act, double z) {
    switch (act) {
        case Activation::SiLU: return silu_derivative(z);
        case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}
} // namespace

Tensor2 mlp_forward(const MlpNet& net, const Tensor2& input, ForwardCache* cache) {
    if (input.cols != net.input_dim) {
        throw ShapeError("mlp_forward: input cols " + std::to_string(input.cols) +
                         " != net input_dim " + std::to_string(net.input_dim));
    }
    if (cache) {
        cache->xs.clear();
        cache->zs.clear();
        cache->net = &net;
        cache->net_version = net.version;
    }
    Tensor2 x = input;
    for (const Layer& layer : net.layers) {
        if (cache) cache->xs.push_back(x);
        Tensor2 z = matmul_nt(x, layer.W);
        for (std::size_t r = 0; r < z.rows; ++r) {
            double* zr = z.row(r);
            for (std::size_t c = 0; c < z.cols; ++c) zr[c] += layer.b[c];
        }
        if (cache) cache->zs.push_back(z);
        if (layer.act == Activation::Identity) {
            x = std::move(z);
        } else {
            x = Tensor2(z.rows, z.cols);
            for (std::size_t i = 0; i < z.data.size(); ++i) {
                x.data[i] = apply_act(layer.act, z.data[i]);
            }
        }
    }
    if (cache) cache->xs.push_back(x);
    return x;
}

Gradients mlp_backward(const MlpNet& net, const ForwardCache& cache, const Tensor2& grad_output) {
    if (cache.net != &net || cache.net_version != net.version) {
        throw CacheError("mlp_backward: cache does not match net (stale or foreign)");
    }
    if (cache.zs.size() != net.layers.size()) {
        throw CacheError("mlp_backward: incomplete cache");
    }
    const Tensor2& out = cache.xs.back();
    if (!grad_output.same_shape(out)) {
        throw ShapeError("mlp_backward: grad_output " + std::to_string(grad_output.rows) + "x" +
                         std::to_string(grad_output.cols) + " != output " +
                         std::to_string(out.rows) + "x" + std::to_string(out.cols));
    }

    Gradients grads;
    grads.gW.resize(net.layers.size());
    grads.gb.resize(net.layers.size());

    Tensor2 g = grad_output;
    for (std::size_t k = net.layers.size(); k-- > 0;) {
        const Layer& layer = net.layers[k];
        const Tensor2& z = cache.zs[k];
        Tensor2 dz = g;
        if (layer.act != Activation::Identity) {
            for (std::size_t i = 0; i < dz.data.size(); ++i) {
                dz.data[i] *= act_derivative(layer.act, z.data[i]);
            }
        }
        grads.gW[k] = matmul_tn(dz, cache.xs[k]);
        grads.gb[k].assign(layer.out_dim(), 0.0);
        for (std::size_t r = 0; r < dz.rows; ++r) {
            const double* dr = dz.row(r);
            for (std::size_t c = 0; c < dz.cols; ++c) grads.gb[k][c] += dr[c];
        }
        g = matmul_nn(dz, layer.W);
    }
    grads.gx = std::move(g);
    return grads;
}

Gradients zero_gradients(const MlpNet& net) {
    Gradients grads;
    for (const Layer& layer : net.layers) {
        grads.gW.emplace_back(layer.out_dim(), layer.in_dim());
        grads.gb.emplace_back(layer.out_dim(), 0.0);
    }
    return grads;
}

void accumulate(Gradients& into, const Gradients& g) {
    for (std::size_t k = 0; k < into.gW.size(); ++k) {
        into.gW[k] += g.gW[k];
        for (std::size_t i = 0; i < into.gb[k].size(); ++i) into.gb[k][i] += g.gb[k][i];
    }
}

std::size_t param_count(const MlpNet& net) {
    std::size_t n = 0;
    for (const Layer& layer : net.layers) n += layer.W.size() + layer.b.size();
    return n;
}

} // namespace sdm
