#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gselab::rng {

// Counter-based randomness. Every uniform is a pure function of a 64-bit
// master seed and an explicit key (a domain tag plus a sorted index subset),
// so samples replay bit-exactly and coupled samplers can share uniforms
// without storing them.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

constexpr std::uint64_t tag(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over the tag string
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform attached to a vertex subset. `subset` must be sorted ascending;
// the encoding is the element sequence folded into the hash, so the value
// depends only on the set, the tag and the seed.
inline double subset_uniform(std::uint64_t seed, std::uint64_t domain_tag,
                             std::span<const int> subset) {
    std::uint64_t h = mix(seed, domain_tag);
    for (int v : subset) h = mix(h, static_cast<std::uint64_t>(v) + 1);
    return to_unit(splitmix64(h));
}

inline double indexed_uniform(std::uint64_t seed, std::uint64_t domain_tag,
                              std::uint64_t index) {
    return to_unit(splitmix64(mix(mix(seed, domain_tag), index)));
}

// Seed for trial `index` of the estimator named `id`: hash(master, id, index).
inline std::uint64_t derive(std::uint64_t master, std::string_view id,
                            std::uint64_t index) {
    return splitmix64(mix(mix(master, tag(id)), index));
}

// A tiny sequential stream on top of the counter scheme, for places that
// just need "the next uniform" (shuffles, restarts, simplex draws).
class Stream {
public:
    Stream(std::uint64_t seed, std::string_view domain)
        : state_(mix(seed, tag(domain))) {}

    double next_unit() {
        state_ = splitmix64(state_ + 0x9e3779b97f4a7c15ULL);
        return to_unit(state_);
    }

    // integer in [0, n)
    int next_below(int n) {
        int v = static_cast<int>(next_unit() * n);
        return v >= n ? n - 1 : v;
    }

private:
    std::uint64_t state_;
};

// First k entries of a seeded Fisher-Yates pass over [0, n).
inline std::vector<int> sample_indices(std::uint64_t seed, int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    Stream s(seed, "fisher-yates");
    for (int i = 0; i < k && i < n; ++i) {
        int j = i + s.next_below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace gselab::rng
