#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace bunow {

// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seeded random stream with platform-independent output. mt19937_64 output
// is pinned by the standard; the distributions here are hand-rolled because
// <random> distributions are not bit-portable across implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform in [0, n), unbiased (rejection sampling).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Independent stream derived from the creation seed and a tag; the
    // result does not depend on how much of this stream was consumed.
    RngStream fork(std::uint64_t tag) const { return RngStream(mix64(seed_ ^ mix64(tag))); }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Fisher-Yates shuffle driven by an RngStream.
template <typename T>
void shuffle(std::vector<T>& items, RngStream& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace bunow
