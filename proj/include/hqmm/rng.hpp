// rng.hpp
// Seeded random source with hand-rolled transforms so that every stream of
// draws is reproducible bit-for-bit from the seed alone.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqmm {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(base ^ mix_seed(stream + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Index drawn from an (unnormalized is fine) nonnegative weight vector.
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0))
            throw std::invalid_argument("categorical: weights sum to zero");
        double r = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return i;
        }
        return weights.size() - 1;
    }

    // First k of 0..n-1 after a Fisher-Yates pass, for sampling without replacement.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        if (k > n) k = n;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(engine_() % (n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

    std::string save_state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void load_state(const std::string& state) {
        std::istringstream is(state);
        is >> engine_;
        if (is.fail()) throw std::invalid_argument("Rng::load_state: malformed state string");
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace hqmm
