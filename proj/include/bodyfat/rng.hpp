#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace bodyfat {

// SplitMix64 (Steele, Lea & Flood 2014), constants per Vigna's reference
// implementation. Chosen over std facilities because every draw here must
// reproduce bit-identically across platforms and languages; std::shuffle
// and the std distributions are unspecified.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) by 128-bit multiply-shift.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

// Decorrelated per-purpose stream seed: one user seed fans out to
// independent generators for shuffling, init, holdout selection, ...
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return SplitMix64(seed ^ ((stream_id + 1) * 0x9E3779B97F4A7C15ULL)).next();
}

// In-place Fisher-Yates, descending form.
template <typename T>
void fisher_yates(std::vector<T>& v, SplitMix64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, SplitMix64& gen) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    fisher_yates(idx, gen);
    return idx;
}

}  // namespace bodyfat
