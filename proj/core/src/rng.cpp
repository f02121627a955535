#include "sdm/rng.hpp"

#include <cmath>
#include <numbers>

#include "sdm/errors.hpp"

namespace sdm {

namespace {
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
} // namespace

std::uint64_t Rng::next_u64() {
    ++counter;
    return mix64(seed + counter * 0x9E3779B97F4A7C15ull);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::gaussian() {
    double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::int_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) throw IndexError("int_range: empty range");
    std::uint64_t span = hi - lo;
    std::uint64_t limit = (~std::uint64_t{0} / span) * span;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return lo + v % span;
}

Tensor2 Rng::gaussian_tensor(std::size_t rows, std::size_t cols) {
    Tensor2 t(rows, cols);
    fill_gaussian(t);
    return t;
}

void Rng::fill_gaussian(Tensor2& t) {
    for (double& v : t.data) v = gaussian();
}

Rng Rng::derive(std::uint64_t stream) const {
    return Rng(mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ull)));
}

} // namespace sdm
