#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ralz {

using symbol = uint8_t;
using symbols = std::vector<symbol>;

// Input alphabets. The value is the number of bits per symbol.
enum class alphabet : uint8_t { bit = 1, byte = 8 };

inline constexpr uint32_t symbol_bits(alphabet a) {
    return static_cast<uint32_t>(a);
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct alphabet_error : error { using error::error; };
struct param_error : error { using error::error; };
struct capacity_error : error { using error::error; };
struct io_error : error { using error::error; };
struct bounds_error : error { using error::error; };
struct malformed_stream_error : error { using error::error; };
struct truncation_error : malformed_stream_error {
    using malformed_stream_error::malformed_stream_error;
};
struct spanner_error : error { using error::error; };

// ---------------------------------------------------------------------------
// Deterministic PRNG (splitmix64). Used for special-codeword coins and
// corpus generation; identical output on every platform for a given seed.
// ---------------------------------------------------------------------------

class splitmix64 {
public:
    explicit splitmix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Bernoulli draw with exact rational bias num/den.
    bool coin(uint64_t num, uint64_t den) {
        if (num == 0) return false;
        if (num >= den) return true;
        return next() % den < num;
    }

    uint64_t below(uint64_t bound) { return bound ? next() % bound : 0; }

private:
    uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline constexpr uint32_t ceil_log2(uint64_t v) {
    uint32_t bits = 0;
    uint64_t p = 1;
    while (p < v) {
        p <<= 1;
        ++bits;
        if (bits >= 63) break;
    }
    return bits;
}

inline constexpr uint64_t ceil_div(uint64_t a, uint64_t b) {
    return (a + b - 1) / b;
}

inline void check_symbols(const symbols& x, alphabet a) {
    if (a == alphabet::byte) return;
    for (symbol s : x)
        if (s > 1)
            throw alphabet_error("symbol " + std::to_string(int(s)) +
                                 " outside bit alphabet");
}

// "0100" <-> {0,1,0,0} conversions for bit-alphabet corpora.
inline symbols bits_from_string(std::string_view s) {
    symbols out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '0')
            out.push_back(0);
        else if (c == '1')
            out.push_back(1);
        else
            throw alphabet_error(std::string("character '") + c +
                                 "' is not a bit");
    }
    return out;
}

inline std::string bits_to_string(const symbols& x) {
    std::string out;
    out.reserve(x.size());
    for (symbol s : x) out.push_back(s ? '1' : '0');
    return out;
}

}  // namespace ralz
