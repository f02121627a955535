#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "sdm/denoiser.hpp"
#include "sdm/mlp.hpp"
#include "sdm/tensor.hpp"

namespace testutil {

inline bool nets_equal(const sdm::MlpNet& a, const sdm::MlpNet& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const auto& la = a.layers[i];
        const auto& lb = b.layers[i];
        if (la.act != lb.act || la.W.rows != lb.W.rows || la.W.cols != lb.W.cols) return false;
        if (la.W.data != lb.W.data || la.b != lb.b) return false;
    }
    return true;
}

inline double max_abs_diff(const sdm::Gradients& a, const sdm::Gradients& b) {
    double m = 0.0;
    for (std::size_t l = 0; l < a.gW.size(); ++l) {
        for (std::size_t i = 0; i < a.gW[l].size(); ++i)
            m = std::max(m, std::fabs(a.gW[l].data[i] - b.gW[l].data[i]));
        for (std::size_t i = 0; i < a.gb[l].size(); ++i)
            m = std::max(m, std::fabs(a.gb[l][i] - b.gb[l][i]));
    }
    return m;
}

// loss = sum(coef .* forward(input)); central differences over every parameter
inline sdm::Gradients fd_gradients(sdm::MlpNet net, const sdm::Tensor2& input,
                                   const sdm::Tensor2& coef, double h = 1e-6) {
    auto loss = [&]() {
        const sdm::Tensor2 out = sdm::mlp_forward(net, input);
        double v = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) v += coef.data[i] * out.data[i];
        return v;
    };
    sdm::Gradients g = sdm::zero_gradients(net);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t i = 0; i < net.layers[l].W.size(); ++i) {
            double& p = net.layers[l].W.data[i];
            const double orig = p;
            p = orig + h;
            const double up = loss();
            p = orig - h;
            const double dn = loss();
            p = orig;
            g.gW[l].data[i] = (up - dn) / (2.0 * h);
        }
        for (std::size_t i = 0; i < net.layers[l].b.size(); ++i) {
            double& p = net.layers[l].b[i];
            const double orig = p;
            p = orig + h;
            const double up = loss();
            p = orig - h;
            const double dn = loss();
            p = orig;
            g.gb[l][i] = (up - dn) / (2.0 * h);
        }
    }
    return g;
}

inline double max_rel_err(const sdm::Gradients& analytic, const sdm::Gradients& fd,
                          double floor = 1e-3) {
    double m = 0.0;
    for (std::size_t l = 0; l < analytic.gW.size(); ++l) {
        for (std::size_t i = 0; i < analytic.gW[l].size(); ++i) {
            const double a = analytic.gW[l].data[i];
            const double f = fd.gW[l].data[i];
            m = std::max(m, std::fabs(a - f) / std::max({std::fabs(a), std::fabs(f), floor}));
        }
        for (std::size_t i = 0; i < analytic.gb[l].size(); ++i) {
            const double a = analytic.gb[l][i];
            const double f = fd.gb[l][i];
            m = std::max(m, std::fabs(a - f) / std::max({std::fabs(a), std::fabs(f), floor}));
        }
    }
    return m;
}

// constant eps-prediction: zero weights, bias = eps_hat; any input maps to the bias
inline sdm::DenoiserNet bias_denoiser(int obs_dim, int horizon, int action_dim,
                                      const std::vector<double>& bias) {
    sdm::DenoiserNet dn;
    dn.obs_dim = obs_dim;
    dn.horizon = horizon;
    dn.action_dim = action_dim;
    sdm::Layer layer;
    layer.W = sdm::Tensor2(static_cast<std::size_t>(dn.chunk_dim()),
                           static_cast<std::size_t>(dn.cond_input_dim()));
    layer.b = bias;
    layer.act = sdm::Activation::Identity;
    dn.net.layers.push_back(layer);
    dn.net.input_dim = static_cast<std::size_t>(dn.cond_input_dim());
    dn.net.output_dim = static_cast<std::size_t>(dn.chunk_dim());
    return dn;
}

struct TempDir {
    std::string path;
    TempDir() {
        char buf[] = "/tmp/sdm_test_XXXXXX";
        path = mkdtemp(buf);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return path + "/" + name; }
};

} // namespace testutil
