#include "sdm/generator.hpp"

#include "sdm/errors.hpp"

namespace sdm {

OneStepGenerator make_generator(const DenoiserNet& teacher, const NoiseSchedule& s) {
    OneStepGenerator g;
    g.net = teacher;
    g.net.net.version = 0;
    g.t_init = s.T;
    return g;
}

OneStepGenerator make_generator_scratch(const DenoiserNet& teacher, const NoiseSchedule& s,
                                        Rng& rng) {
    std::vector<std::size_t> dims;
    dims.push_back(teacher.net.input_dim);
    for (std::size_t k = 0; k + 1 < teacher.net.layers.size(); ++k) {
        dims.push_back(teacher.net.layers[k].out_dim());
    }
    dims.push_back(teacher.net.output_dim);

    OneStepGenerator g;
    g.net = teacher;
    g.net.net = make_mlp(dims, rng);
    g.t_init = s.T;
    return g;
}

DenoiseOut generator_sample(const OneStepGenerator& g, const NoiseSchedule& s, const Tensor2& z,
                            const Tensor2& obs, ForwardCache* cache) {
    if (z.cols != static_cast<std::size_t>(g.net.chunk_dim())) {
        throw ShapeError("generator_sample: z cols " + std::to_string(z.cols) + " != chunk dim " +
                         std::to_string(g.net.chunk_dim()));
    }
    const std::vector<int> ts(z.rows, g.t_init);
    return predict_x0(g.net, s, z, ts, obs, cache);
}

} // namespace sdm
