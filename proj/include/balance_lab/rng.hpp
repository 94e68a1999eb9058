#ifndef BALANCE_LAB_RNG_HPP
#define BALANCE_LAB_RNG_HPP

#include <cstdint>
#include <random>

namespace balance_lab {

/// Seeded generator with a fixed mapping to doubles, so that every stream is
/// reproducible bit-for-bit across platforms (mt19937_64 output is specified
/// by the standard; distributions are not, so we avoid <random> distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? gen_() % n : 0; }

private:
    std::mt19937_64 gen_;
};

}  // namespace balance_lab

#endif
