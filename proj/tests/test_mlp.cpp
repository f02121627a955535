#include "doctest.h"

#include <cmath>

#include "sdm/errors.hpp"
#include "sdm/mlp.hpp"
#include "test_util.hpp"

using namespace sdm;

namespace {

MlpNet identity_layer_net(std::size_t dim, Activation act) {
    MlpNet net;
    Layer l;
    l.W = Tensor2(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) l.W.at(i, i) = 1.0;
    l.b.assign(dim, 0.0);
    l.act = act;
    net.layers.push_back(l);
    net.input_dim = dim;
    net.output_dim = dim;
    return net;
}

} // namespace

TEST_CASE("identity layer passes input through") {
    MlpNet net = identity_layer_net(2, Activation::Identity);
    Tensor2 in(1, 2);
    in.at(0, 0) = 1.0;
    in.at(0, 1) = 2.0;
    Tensor2 out = mlp_forward(net, in);
    CHECK(out.at(0, 0) == 1.0);
    CHECK(out.at(0, 1) == 2.0);
}

TEST_CASE("relu layer clips negatives") {
    MlpNet net = identity_layer_net(2, Activation::ReLU);
    Tensor2 in(1, 2);
    in.at(0, 0) = -1.0;
    in.at(0, 1) = 3.0;
    Tensor2 out = mlp_forward(net, in);
    CHECK(out.at(0, 0) == 0.0);
    CHECK(out.at(0, 1) == 3.0);
}

TEST_CASE("two half-weight layers with silu hidden") {
    MlpNet net;
    for (int i = 0; i < 2; ++i) {
        Layer l;
        l.W = Tensor2(1, 1, 0.5);
        l.b.assign(1, 0.0);
        l.act = i == 0 ? Activation::SiLU : Activation::Identity;
        net.layers.push_back(l);
    }
    net.input_dim = 1;
    net.output_dim = 1;
    Tensor2 in(1, 1, 1.0);
    ForwardCache cache;
    Tensor2 out = mlp_forward(net, in, &cache);
    CHECK(cache.zs[0].at(0, 0) == doctest::Approx(0.5));
    CHECK(cache.xs[1].at(0, 0) == doctest::Approx(0.31123).epsilon(1e-4)); // SiLU(0.5)
    CHECK(out.at(0, 0) == doctest::Approx(0.15561).epsilon(1e-4));
}

TEST_CASE("silu matches x*sigmoid(x)") {
    for (double x : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
        CHECK(silu(x) == doctest::Approx(x / (1.0 + std::exp(-x))).epsilon(1e-12));
        // derivative by central difference
        const double h = 1e-6;
        CHECK(silu_derivative(x) ==
              doctest::Approx((silu(x + h) - silu(x - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("forward rejects mismatched input width") {
    Rng rng(3);
    MlpNet net = make_mlp({4, 8, 2}, rng);
    Tensor2 in(1, 5);
    CHECK_THROWS_AS(mlp_forward(net, in), ShapeError);
}

TEST_CASE("backward of identity layer passes grad through") {
    MlpNet net = identity_layer_net(3, Activation::Identity);
    Tensor2 in(2, 3, 0.5);
    ForwardCache cache;
    mlp_forward(net, in, &cache);
    Tensor2 go(2, 3);
    for (std::size_t i = 0; i < go.size(); ++i) go.data[i] = static_cast<double>(i);
    Gradients g = mlp_backward(net, cache, go);
    CHECK(g.gx.data == go.data);
}

TEST_CASE("zero grad_output gives zero param grads") {
    Rng rng(5);
    MlpNet net = make_mlp({3, 6, 2}, rng);
    Tensor2 in = rng.gaussian_tensor(4, 3);
    ForwardCache cache;
    mlp_forward(net, in, &cache);
    Gradients g = mlp_backward(net, cache, Tensor2(4, 2));
    for (const auto& gw : g.gW)
        for (double v : gw.data) CHECK(v == 0.0);
    for (const auto& gb : g.gb)
        for (double v : gb) CHECK(v == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t depth = 1 + rng.int_range(0, 3);
        std::vector<std::size_t> dims;
        dims.push_back(1 + rng.int_range(0, 8));
        for (std::size_t d = 0; d < depth; ++d) dims.push_back(1 + rng.int_range(0, 16));
        const Activation act = trial % 2 == 0 ? Activation::SiLU : Activation::ReLU;
        MlpNet net = make_mlp(dims, rng, act);

        Tensor2 in = rng.gaussian_tensor(3, dims.front());
        Tensor2 coef = rng.gaussian_tensor(3, dims.back());
        ForwardCache cache;
        mlp_forward(net, in, &cache);
        Gradients analytic = mlp_backward(net, cache, coef);
        Gradients fd = testutil::fd_gradients(net, in, coef);
        CHECK(testutil::max_rel_err(analytic, fd) <= 1e-5);
    }
}

TEST_CASE("backward is linear in grad_output") {
    Rng rng(23);
    MlpNet net = make_mlp({4, 10, 3}, rng);
    Tensor2 in = rng.gaussian_tensor(5, 4);
    ForwardCache cache;
    mlp_forward(net, in, &cache);
    Tensor2 g1 = rng.gaussian_tensor(5, 3);
    Tensor2 g2 = rng.gaussian_tensor(5, 3);
    Gradients a = mlp_backward(net, cache, g1);
    Gradients b = mlp_backward(net, cache, g2);
    Gradients sum = mlp_backward(net, cache, g1 + g2);
    Gradients acc = zero_gradients(net);
    accumulate(acc, a);
    accumulate(acc, b);
    CHECK(testutil::max_abs_diff(sum, acc) <= 1e-12);
}

TEST_CASE("stale cache is rejected after parameter mutation") {
    Rng rng(29);
    MlpNet net = make_mlp({2, 4, 2}, rng);
    Tensor2 in = rng.gaussian_tensor(1, 2);
    ForwardCache cache;
    mlp_forward(net, in, &cache);
    net.layers[0].W.at(0, 0) += 0.1;
    net.version += 1;
    CHECK_THROWS_AS(mlp_backward(net, cache, Tensor2(1, 2)), CacheError);
}

TEST_CASE("fixed seed gives bit-identical forward and backward") {
    auto run = [] {
        Rng rng(31);
        MlpNet net = make_mlp({3, 8, 8, 2}, rng);
        Tensor2 in = rng.gaussian_tensor(4, 3);
        ForwardCache cache;
        Tensor2 out = mlp_forward(net, in, &cache);
        Gradients g = mlp_backward(net, cache, rng.gaussian_tensor(4, 2));
        return std::make_pair(out.data, g.gW[0].data);
    };
    auto a = run();
    auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("validate_net rejects broken chains") {
    Rng rng(37);
    MlpNet net = make_mlp({3, 5, 2}, rng);
    validate_net(net);
    net.layers[1].W = Tensor2(2, 4); // in dim no longer matches
    CHECK_THROWS_AS(validate_net(net), ShapeError);
    MlpNet net2 = make_mlp({3, 5, 2}, rng);
    net2.layers.back().act = Activation::SiLU;
    CHECK_THROWS_AS(validate_net(net2), ConfigError);
}

TEST_CASE("param_count adds weights and biases") {
    Rng rng(41);
    MlpNet net = make_mlp({3, 5, 2}, rng);
    CHECK(param_count(net) == 3 * 5 + 5 + 5 * 2 + 2);
}
