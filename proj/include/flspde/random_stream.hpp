#pragma once

#include <cstdint>
#include <random>

namespace flspde {

/// splitmix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of substream `stream_id` under `root_seed`:
/// splitmix64(splitmix64(root_seed) ^ splitmix64(~stream_id)).
constexpr std::uint64_t substream_seed(std::uint64_t root_seed, std::uint64_t stream_id) {
    return splitmix64(splitmix64(root_seed) ^ splitmix64(~stream_id));
}

/// Deterministic normal stream. Substreams with distinct ids are
/// independent for practical purposes, so path p can be simulated from
/// RandomStream(seed, p) without reference to any other path.
class RandomStream {
public:
    RandomStream(std::uint64_t root_seed, std::uint64_t stream_id)
        : root_seed_(root_seed), stream_id_(stream_id), engine_(substream_seed(root_seed, stream_id)) {}

    double normal() { return normal_(engine_); }

    std::uint64_t root_seed() const { return root_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t root_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

} // namespace flspde
