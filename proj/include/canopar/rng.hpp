#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace canopar::rng {

// Counter-based generator (Philox 4x32-10, Salmon et al. 2011). Every random
// draw is a pure function of (seed, pass, slot, entity, sample), so results
// do not depend on evaluation order or worker count.

namespace detail {

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kM0, c[0], lo0, hi0);
    mul_hi_lo(kM1, c[2], lo1, hi1);
    std::uint32_t r0 = hi1 ^ c[1] ^ k[0];
    std::uint32_t r1 = lo1;
    std::uint32_t r2 = hi0 ^ c[3] ^ k[1];
    std::uint32_t r3 = lo0;
    c[0] = r0; c[1] = r1; c[2] = r2; c[3] = r3;
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2, std::uint32_t c3,
                                               std::uint64_t seed) {
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    std::uint32_t ctr[4] = {c0, c1, c2, c3};
    std::uint32_t key[2] = {static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
    for (int round = 0; round < 10; ++round) {
        detail::philox_round(ctr, key);
        key[0] += kW0;
        key[1] += kW1;
    }
    return {ctr[0], ctr[1], ctr[2], ctr[3]};
}

// Stream identifiers. `slot` carries sub-stream data (scattering iteration,
// face index, ...) and `entity` the primitive / plant / sensor id.
enum Pass : std::uint32_t {
    kDirect = 1,
    kDiffuse = 2,
    kScatter = 3,
    kSensor = 4,
    kPlantGen = 5,
    kFieldOrient = 6,
    kTest = 100,
};

struct Quad {
    double u0, u1, u2, u3;  // each uniform in (0, 1)
};

inline double to_unit(std::uint32_t w) {
    return (static_cast<double>(w) + 0.5) * (1.0 / 4294967296.0);
}

inline Quad uniform4(std::uint64_t seed, std::uint32_t pass, std::uint32_t slot,
                     std::uint32_t entity, std::uint32_t sample) {
    auto w = philox4x32(pass, slot, entity, sample, seed);
    return {to_unit(w[0]), to_unit(w[1]), to_unit(w[2]), to_unit(w[3])};
}

inline double uniform1(std::uint64_t seed, std::uint32_t pass, std::uint32_t slot,
                       std::uint32_t entity, std::uint32_t sample) {
    return uniform4(seed, pass, slot, entity, sample).u0;
}

// Standard normal via Box-Muller.
inline double gaussian(std::uint64_t seed, std::uint32_t pass, std::uint32_t slot,
                       std::uint32_t entity, std::uint32_t sample) {
    Quad q = uniform4(seed, pass, slot, entity, sample);
    return std::sqrt(-2.0 * std::log(q.u0)) * std::cos(2.0 * 3.14159265358979323846 * q.u1);
}

}  // namespace canopar::rng
