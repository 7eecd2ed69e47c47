#include "senti/rng.hpp"

namespace senti {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng Rng::stream(std::uint64_t seed, std::string_view name) {
    // Mix the seed with the stream name, then advance once so neighbouring
    // seeds do not start from neighbouring states.
    std::uint64_t s = seed ^ fnv1a64(name);
    splitmix64(s);
    return Rng(s);
}

Rng Rng::stream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    std::uint64_t s = seed ^ fnv1a64(name);
    s += 0x632be59bd9b4e019ULL * (index + 1);
    splitmix64(s);
    return Rng(s);
}

std::uint64_t Rng::next() {
    return splitmix64(state_);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // Rejection sampling over the largest multiple of bound.
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

double Rng::unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    // Partial Fisher-Yates: only the first k positions are finalized.
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace senti
