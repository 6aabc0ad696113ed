#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace imcl {

using elem = std::uint32_t;
using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

// Error classes map one-to-one onto CLI exit codes.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t gcd_u(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }
inline std::uint64_t lcm_u(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Inverse of a modulo m; throws DomainError when gcd(a, m) != 1.
inline std::int64_t inv_mod(std::int64_t a, std::int64_t m)
{
    if (m == 1) return 0;
    std::int64_t g = m, x = 0, x1 = 1, a1 = mod_floor(a, m);
    while (a1 != 0) {
        std::int64_t q = g / a1;
        std::int64_t t = g - q * a1;
        g = a1;
        a1 = t;
        t = x - q * x1;
        x = x1;
        x1 = t;
    }
    if (g != 1) throw DomainError("inv_mod: " + std::to_string(a) + " is not a unit mod " + std::to_string(m));
    return mod_floor(x, m);
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
{
    unsigned __int128 r = 1 % m, x = b % m;
    while (e) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<std::uint64_t>(r);
}

// Multiplicative order of q modulo m (m >= 1, gcd(q, m) = 1).
inline std::uint64_t mult_order(std::uint64_t q, std::uint64_t m)
{
    if (m == 1) return 1;
    if (std::gcd(q % m, m) != 1) throw DomainError("mult_order: base not a unit");
    std::uint64_t k = 1, x = q % m;
    while (x != 1) {
        x = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * q % m);
        ++k;
    }
    return k;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n)
{
    std::vector<std::uint64_t> ps;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

inline bool is_prime_u(std::uint64_t n)
{
    if (n < 2) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

inline int valuation(std::uint64_t n, std::uint64_t p)
{
    int v = 0;
    while (n && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline std::string to_string(const rational& r)
{
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

// FNV-1a, used for cache keys and report fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL)
{
    auto p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL)
{
    return fnv1a(s.data(), s.size(), h);
}

// Counter-based stream: one independent substream per (seed, index).
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0) : s_(seed ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))
    {
        next();
    }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }
    result_type operator()() { return next(); }
    result_type next()
    {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // uniform on [0, n), rejection to avoid modulo bias
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t lim = max() - max() % n;
        std::uint64_t x;
        do x = next();
        while (x >= lim);
        return x % n;
    }

private:
    std::uint64_t s_;
};

} // namespace imcl
