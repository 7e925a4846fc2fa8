#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace causumx {

// Error taxonomy mapped to CLI exit codes: UsageError -> 1, DataError -> 2,
// anything else -> 3.
class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public EngineError {
public:
    using EngineError::EngineError;
};

class DataError : public EngineError {
public:
    using EngineError::EngineError;
};

// 64-bit FNV-1a, used to derive per-task seeds from (run seed, task labels).
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t deriveSeed(std::uint64_t base, std::string_view label) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((base >> (8 * i)) & 0xff);
    return fnv1a64(label, fnv1a64(std::string_view(buf, 8)));
}

// Deterministic RNG wrapper. std::uniform_int_distribution is not portable
// across standard libraries, so bounded draws use rejection sampling on the
// raw mt19937_64 stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform integer in [0, bound).
    std::uint64_t nextBelow(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::nextBelow: bound must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double nextUnit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

// Runs fn(0..n-1) on up to `threads` workers. Exceptions from workers are
// rethrown on the calling thread after all workers finished.
void parallelFor(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal rendering of a double (std::to_chars).
std::string formatDouble(double v);

std::string joinStrings(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace causumx
