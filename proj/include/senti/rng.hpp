#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace senti {

// Deterministic 64-bit generator (splitmix64) with named sub-streams.
//
// Every random decision in the toolkit draws from a stream derived from
// (seed, stream name[, index]), so adding one randomized stage never
// perturbs the draws of another. The sampling helpers below avoid
// std::uniform_*_distribution on purpose: their output is not pinned by
// the standard, and reproducibility here is byte-level.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng stream(std::uint64_t seed, std::string_view name);
    static Rng stream(std::uint64_t seed, std::string_view name, std::uint64_t index);

    std::uint64_t next();

    // Uniform in [0, bound); bound must be nonzero. Unbiased via rejection.
    std::uint64_t below(std::uint64_t bound);

    // Uniform in [0, 1) with 53 bits of precision.
    double unit();

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // First k elements of a shuffled copy of [0, n): a uniform k-subset,
    // in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::uint64_t state_;
};

// FNV-1a over bytes; used for stream naming and content hashes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace senti
