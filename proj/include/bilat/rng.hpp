#ifndef BILAT_RNG_HPP
#define BILAT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "bilat/model.hpp"
#include "bilat/numeric.hpp"

namespace bilat {

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
#if defined(__SIZEOF_INT128__)
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
#else
    const std::uint64_t a_lo = a & 0xffffffffULL, a_hi = a >> 32;
    const std::uint64_t b_lo = b & 0xffffffffULL, b_hi = b >> 32;
    const std::uint64_t t = a_lo * b_hi + ((a_lo * b_lo) >> 32);
    const std::uint64_t u = a_hi * b_lo + (t & 0xffffffffULL);
    hi = a_hi * b_hi + (t >> 32) + (u >> 32);
    lo = a * b;
#endif
}

// One Philox-2x64-10 block: 128-bit counter (c0 = stream, c1 = block index)
// under a 64-bit key.
inline void philox2x64(std::uint64_t c0, std::uint64_t c1, std::uint64_t key,
                       std::uint64_t& out0, std::uint64_t& out1) {
    constexpr std::uint64_t kMult = 0xD2B74407B1CE6E93ULL;
    constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi, lo;
        mulhilo64(kMult, c0, hi, lo);
        c0 = hi ^ key ^ c1;
        c1 = lo;
        key += kWeyl;
    }
    out0 = c0;
    out1 = c1;
}

}  // namespace detail

// Counter-based stream keyed by (seed, stream_id): equal pairs reproduce the
// same sequence on every platform, distinct pairs give independent streams.
class RngStream {
 public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(seed), stream_(stream_id) {}

    std::uint64_t next_u64() {
        if (have_ == 0) {
            detail::philox2x64(stream_, block_++, key_, buf_[0], buf_[1]);
            have_ = 2;
        }
        return buf_[2 - have_--];
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return key_; }
    std::uint64_t stream_id() const { return stream_; }

 private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int have_ = 0;
};

namespace detail {

// Single-uniform inversion along the binomial CDF; fine while n*p is modest.
inline std::int64_t binomial_inversion(RngStream& rng, std::int64_t n, double p) {
    const double u = rng.next_double();
    double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
    double cdf = pmf;
    const double ratio = p / (1.0 - p);
    std::int64_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cdf += pmf;
    }
    return k;
}

// Hormann's BTRS transformed-rejection sampler; requires p <= 0.5, n*p >= 10.
inline std::int64_t binomial_btrs(RngStream& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double spq = std::sqrt(n * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double urvr = 0.86 * vr;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const std::int64_t mode = static_cast<std::int64_t>((n + 1) * p);
    const double h = log_factorial(static_cast<double>(mode)) +
                     log_factorial(static_cast<double>(n - mode));

    for (;;) {
        double v = rng.next_double();
        double u;
        if (v <= urvr) {
            u = v / vr - 0.43;
            return static_cast<std::int64_t>(
                std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + c));
        }
        if (v >= vr) {
            u = rng.next_double() - 0.5;
        } else {
            u = v / vr - 0.93;
            u = (u < 0.0 ? -0.5 : 0.5) - u;
            v = rng.next_double() * vr;
        }
        const double us = 0.5 - std::fabs(u);
        const std::int64_t k =
            static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + c));
        if (k < 0 || k > n)
            continue;
        v = v * alpha / (a / (us * us) + b);
        if (std::log(v) <= h - log_factorial(static_cast<double>(k)) -
                               log_factorial(static_cast<double>(n - k)) +
                               (k - mode) * lpq)
            return k;
    }
}

}  // namespace detail

inline std::int64_t sample_binomial(RngStream& rng, std::int64_t n, double p) {
    if (n < 0)
        throw std::invalid_argument("sample_binomial: n must be nonnegative");
    if (n == 0 || p <= 0.0)
        return 0;
    if (p >= 1.0)
        return n;
    if (p > 0.5)
        return n - sample_binomial(rng, n, 1.0 - p);
    if (n <= 64 || n * p < 10.0)
        return detail::binomial_inversion(rng, n, p);
    return detail::binomial_btrs(rng, n, p);
}

struct TrinomialCounts {
    std::int64_t m0 = 0;
    std::int64_t m1 = 0;
    std::int64_t m2 = 0;
};

// (m0, m1, m2) ~ Multinomial(n; p0, p1, p2) by conditional binomial splits.
inline TrinomialCounts sample_trinomial(RngStream& rng, std::int64_t n, const ProbTriple& probs) {
    if (n < 1)
        throw std::invalid_argument("sample_trinomial: n must be at least 1");
    TrinomialCounts out;
    out.m0 = sample_binomial(rng, n, probs.p0);
    const std::int64_t rest = n - out.m0;
    const double p12 = probs.p1 + probs.p2;
    if (rest > 0 && p12 > 0.0)
        out.m1 = sample_binomial(rng, rest, probs.p1 / p12);
    out.m2 = rest - out.m1;
    return out;
}

}  // namespace bilat

#endif  // BILAT_RNG_HPP
