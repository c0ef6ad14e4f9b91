#ifndef QNNF_RNG_HPP
#define QNNF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <cstddef>

namespace qnnf {

// PCG32 (pcg_xsh_rr_64_32). 64-bit state, fixed default stream, so results
// are reproducible across platforms and standard-library versions.
// std::mt19937 + std::uniform_real_distribution would not give that: the
// distribution's output is implementation-defined.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0x14057b7ef767814fULL) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    // Unbiased bounded draw (Lemire-style rejection).
    std::uint32_t next_below(std::uint32_t bound) {
        std::uint32_t threshold = (-bound) % bound;
        for (;;) {
            std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0,1) with 53-bit resolution.
    double next_double() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Marsaglia polar method; avoids std::normal_distribution for portability.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double mul = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * mul;
        have_spare_ = true;
        return u * mul;
    }

    template <typename T>
    void shuffle(T* data, std::size_t n) {
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = next_below(static_cast<std::uint32_t>(i));
            T tmp = data[i - 1];
            data[i - 1] = data[j];
            data[j] = tmp;
        }
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qnnf

#endif
