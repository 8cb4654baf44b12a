#pragma once

#include <cstdint>
#include <random>

namespace textclf::detail {

// Uniform draw from [0, bound) by modulo rejection. std::uniform_int_distribution
// is implementation-defined, so seeded fixtures would not be portable with it.
inline std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = gen();
        if (r >= threshold) return r % bound;
    }
}

} // namespace textclf::detail
