#ifndef GAZEKIT_RNG_HPP
#define GAZEKIT_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace gazekit {

/// FNV-1a, used for config fingerprints and labeled seed derivation.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives a stage seed from a master seed and a label, so stages can be
/// re-run independently without correlated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    return fnv1a(label, master ^ 0x9e3779b97f4a7c15ULL);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view label) {
    return std::mt19937_64(derive_seed(master, label));
}

}  // namespace gazekit

#endif
