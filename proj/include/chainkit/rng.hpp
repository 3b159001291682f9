#pragma once

#include <cstdint>

// Counter-based random numbers: substream j of a 64-bit seed is hash(seed, j),
// so sample-level parallelism never depends on draw order. Gaussian variates
// come from the inverse CDF, which keeps streams bit-reproducible across
// platforms (no rejection branches).

namespace chainkit {

std::uint64_t mix64(std::uint64_t x);  // splitmix64 finalizer

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_uniform();  // in (0,1), 53-bit resolution, never 0 or 1
    double next_normal();
    int next_sign();        // +1 or -1 with equal probability

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Wichura's PPND16 algorithm (AS 241): Phi^{-1}(p) to near double precision.
double normal_quantile(double p);

}  // namespace chainkit
