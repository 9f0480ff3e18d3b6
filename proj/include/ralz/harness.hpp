#pragma once

#include <iomanip>
#include <sstream>

#include "baseline.hpp"
#include "det.hpp"
#include "rand.hpp"

namespace ralz {

// ---------------------------------------------------------------------------
// Corpus generators. All are pure functions of their arguments.
// ---------------------------------------------------------------------------

inline symbols gen_random(uint64_t n, uint64_t seed, alphabet a) {
    if (n < 1) throw param_error("corpus length must be at least 1");
    symbols out;
    out.reserve(n);
    splitmix64 rng(seed);
    if (a == alphabet::bit) {
        uint64_t bits = 0;
        uint32_t left = 0;
        for (uint64_t i = 0; i < n; ++i) {
            if (left == 0) {
                bits = rng.next();
                left = 64;
            }
            out.push_back(symbol(bits & 1));
            bits >>= 1;
            --left;
        }
    } else {
        for (uint64_t i = 0; i < n; ++i) out.push_back(symbol(rng.next() & 0xff));
    }
    return out;
}

inline symbols gen_repetitive(uint64_t n, uint64_t period, uint64_t seed, alphabet a) {
    if (period < 1) throw param_error("period must be at least 1");
    symbols unit = gen_random(period, seed, a);
    symbols out;
    out.reserve(n);
    for (uint64_t i = 0; i < n; ++i) out.push_back(unit[i % period]);
    return out;
}

namespace detail {

inline void append_fixed_width(symbols& out, uint64_t value, uint32_t width) {
    for (uint32_t b = width; b-- > 0;) out.push_back(symbol((value >> b) & 1));
}

}  // namespace detail

// All binary strings of length 1..k-1, ordered by length then lexicographically.
// Each enumerated string parses into exactly one phrase, so the encoding has
// 2^k - 2 codewords.
inline symbols gen_lb_s(uint64_t k) {
    if (k < 3) throw param_error("k must be at least 3");
    symbols out;
    for (uint32_t len = 1; len + 1 <= k; ++len)
        for (uint64_t v = 0; v < (uint64_t(1) << len); ++v)
            detail::append_fixed_width(out, v, len);
    return out;
}

// Variant of gen_lb_s with the (q+ell)-th length-(k-1) string replaced by
// 0^k, where q = 2^(k-1)/4. The replacement parses as the phrase 0^(k-1)
// extended by one symbol, so the two encodings differ in exactly one
// codeword.
inline symbols gen_lb_s_ell(uint64_t k, uint64_t ell) {
    if (k < 3) throw param_error("k must be at least 3");
    uint64_t q = (uint64_t(1) << (k - 1)) / 4;
    if (ell < 1 || ell > q) throw bounds_error("ell out of [1, q]");
    symbols out;
    for (uint32_t len = 1; len + 1 <= k; ++len)
        for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) {
            if (len == k - 1 && v == q + ell - 1)
                detail::append_fixed_width(out, 0, uint32_t(k));
            else
                detail::append_fixed_width(out, v, len);
        }
    return out;
}

// The same enumeration with every string prefixed by 0, followed by the
// unary runs 1, 11, ..., 1^t. ell = 0 gives the base string, ell >= 1 the
// single-codeword-difference variant.
inline symbols gen_lb_extended(uint64_t k, uint64_t t, uint64_t ell = 0) {
    if (k < 3) throw param_error("k must be at least 3");
    if (t < 1) throw param_error("t must be at least 1");
    uint64_t q = (uint64_t(1) << (k - 1)) / 4;
    if (ell > q) throw bounds_error("ell out of [0, q]");
    symbols out;
    for (uint32_t len = 1; len + 1 <= k; ++len)
        for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) {
            out.push_back(0);
            if (ell >= 1 && len == k - 1 && v == q + ell - 1)
                detail::append_fixed_width(out, 0, uint32_t(k));
            else
                detail::append_fixed_width(out, v, len);
        }
    for (uint64_t i = 1; i <= t; ++i)
        for (uint64_t j = 0; j < i; ++j) out.push_back(1);
    return out;
}

// Deep-trie adversarial corpus: 0, 01, 011, 0111, ... truncated to n. The
// phrase trie degenerates to a single path of depth ~sqrt(2n).
inline symbols gen_ramp(uint64_t n) {
    if (n < 1) throw param_error("corpus length must be at least 1");
    symbols out;
    out.reserve(n);
    for (uint64_t run = 0; out.size() < n; ++run) {
        out.push_back(0);
        for (uint64_t j = 0; j < run && out.size() < n; ++j) out.push_back(1);
    }
    out.resize(n);
    return out;
}

// Byte-alphabet stand-ins for the kinds of files the schemes target.

inline symbols gen_loglike(uint64_t n, uint64_t seed) {
    static const char* levels[] = {"INFO", "WARN", "DEBUG", "ERROR"};
    static const char* ops[] = {"fetch", "store", "evict", "sync", "ping"};
    splitmix64 rng(seed);
    std::string s;
    s.reserve(n + 80);
    uint64_t clock = 1700000000;
    while (s.size() < n) {
        clock += rng.below(30);
        s += std::to_string(clock);
        s += " ";
        s += levels[rng.below(4)];
        s += " worker-";
        s += std::to_string(rng.below(16));
        s += " ";
        s += ops[rng.below(5)];
        s += " id=";
        s += std::to_string(rng.below(100000));
        s += " took ";
        s += std::to_string(rng.below(500));
        s += "ms\n";
    }
    s.resize(n);
    return symbols(s.begin(), s.end());
}

inline symbols gen_dnalike(uint64_t n, uint64_t seed) {
    static const char bases[] = {'A', 'C', 'G', 'T'};
    splitmix64 rng(seed);
    symbols out;
    out.reserve(n);
    while (out.size() < n) {
        if (out.size() > 64 && rng.below(4) == 0) {
            // Repeat an earlier segment.
            uint64_t len = 8 + rng.below(40);
            uint64_t from = rng.below(out.size() - len > 0 ? out.size() - len : 1);
            for (uint64_t i = 0; i < len && out.size() < n; ++i)
                out.push_back(out[from + i]);
        } else {
            out.push_back(symbol(bases[rng.below(4)]));
        }
    }
    return out;
}

inline symbols gen_vocablike(uint64_t n, uint64_t seed) {
    static const char* syllables[] = {"ka", "ro", "lin", "ta", "mi", "sol",
                                      "ver", "du", "ne", "pra", "os", "ze"};
    splitmix64 rng(seed);
    std::string s;
    s.reserve(n + 16);
    while (s.size() < n) {
        uint64_t parts = 2 + rng.below(3);
        for (uint64_t i = 0; i < parts; ++i) s += syllables[rng.below(12)];
        s += "\n";
    }
    s.resize(n);
    return symbols(s.begin(), s.end());
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

struct access_stats {
    uint64_t samples = 0;
    double visits_mean = 0;
    double visits_median = 0;
    double visits_p999 = 0;
    double visits_max = 0;
};

struct bench_row {
    std::string corpus;
    std::string scheme;
    double alpha = 0;  // special fraction (0 for lz78/det)
    uint64_t seed = 0;
    uint64_t n = 0;
    uint64_t m = 0;   // baseline phrase count
    uint64_t m1 = 0;  // simple codewords
    uint64_t m2 = 0;  // special codewords
    uint64_t m3 = 0;  // position anchors
    uint64_t words = 0;  // payload words (footer excluded)
    double ratio = 0;    // words / m
    access_stats access;
};

inline access_stats measure_access(const stream_view& v, uint64_t samples,
                                   uint64_t seed) {
    splitmix64 rng(seed);
    std::vector<uint64_t> visits;
    visits.reserve(samples);
    // The baseline has no access path: the only way to reach a position is
    // to expand codewords from the start, so its cost is the index of the
    // phrase containing the position.
    std::vector<uint64_t> starts;
    if (v.header->scheme == scheme_kind::lz78) {
        auto cws = baseline_phrases(v);
        std::vector<uint64_t> depths{0};
        uint64_t covered = 0;
        for (const lz78_codeword& cw : cws) {
            depths.push_back(depths[cw.parent] + 1);
            starts.push_back(covered + 1);
            covered += depths.back();
        }
    }
    for (uint64_t i = 0; i < samples; ++i) {
        uint64_t pos = 1 + rng.below(v.length);
        access_trace trace;
        if (v.header->scheme == scheme_kind::lz78) {
            uint64_t t =
                std::upper_bound(starts.begin(), starts.end(), pos) - starts.begin();
            trace.codewords_read = t;
        } else if (v.header->scheme == scheme_kind::deterministic) {
            det_access(v, pos, &trace);
        } else {
            rand_access(v, pos, &trace);
        }
        visits.push_back(trace.node_visits());
    }
    std::sort(visits.begin(), visits.end());
    access_stats st;
    st.samples = samples;
    if (samples == 0) return st;
    double sum = 0;
    for (uint64_t x : visits) sum += double(x);
    st.visits_mean = sum / double(samples);
    st.visits_median = double(visits[samples / 2]);
    st.visits_p999 = double(visits[std::min<uint64_t>(
        samples - 1, uint64_t(std::ceil(0.999 * double(samples))) - 1)]);
    st.visits_max = double(visits.back());
    return st;
}

inline std::pair<uint64_t, uint64_t> alpha_to_rational(double alpha) {
    if (alpha < 0 || alpha > 1) throw param_error("alpha must be in [0, 1]");
    uint64_t den = uint64_t(1) << 20;
    uint64_t num = uint64_t(std::llround(alpha * double(den)));
    if (num == 0) return {0, 1};
    uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

// Compresses one corpus with the baseline, the deterministic scheme, and the
// randomized scheme at each special fraction and seed; optionally samples
// random accesses on the access-capable streams.
inline std::vector<bench_row> measure_competitive(
    const std::string& corpus, const symbols& x, alphabet a,
    const std::vector<double>& alphas, const std::vector<uint64_t>& seeds,
    uint64_t access_samples = 0) {
    std::vector<bench_row> rows;
    uint64_t n = x.size();
    uint64_t m = lz78_parse(x, a).size();

    bench_row base{corpus, "lz78", 0, 0, n, m, m, 0, 0, m, 1.0, {}};
    if (access_samples) {
        word_stream bl = baseline_compress(x, n, a);
        base.access = measure_access(view_of(bl), access_samples, 1);
    }
    rows.push_back(base);

    word_stream det = det_compress(x, n, a);
    bench_row drow{corpus, "det", 0, 0, n, m, 0, 0, 0, det.payload_words(),
                   double(det.payload_words()) / double(m), {}};
    if (access_samples)
        drow.access = measure_access(view_of(det), access_samples, 1);
    rows.push_back(drow);

    for (double alpha : alphas) {
        auto [num, den] = alpha_to_rational(alpha);
        for (uint64_t seed : seeds) {
            scheme_params prm = scheme_params::from_alpha(num, den, n, a, seed);
            online_compressor c(prm);
            for (symbol s : x) c.push(s);
            word_stream ws = c.finalize();
            auto counts = c.counts();
            bench_row row{corpus, "rand", alpha, seed, n, m, counts.simple,
                          counts.special, counts.anchor, ws.payload_words(),
                          double(ws.payload_words()) / double(m), {}};
            if (access_samples)
                row.access = measure_access(view_of(ws), access_samples, seed + 1);
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV emission (stable column order; see the README for the schema)
// ---------------------------------------------------------------------------

inline const char* csv_header() {
    return "corpus,scheme,alpha,seed,n,m,m1,m2,m3,words,ratio,"
           "access_samples,visits_mean,visits_median,visits_p999,visits_max";
}

inline void emit_csv(const std::vector<bench_row>& rows, std::ostream& os) {
    os << csv_header() << "\n";
    os << std::setprecision(17);
    for (const bench_row& r : rows) {
        os << r.corpus << ',' << r.scheme << ',' << r.alpha << ',' << r.seed
           << ',' << r.n << ',' << r.m << ',' << r.m1 << ',' << r.m2 << ','
           << r.m3 << ',' << r.words << ',' << r.ratio << ','
           << r.access.samples << ',' << r.access.visits_mean << ','
           << r.access.visits_median << ',' << r.access.visits_p999 << ','
           << r.access.visits_max << "\n";
    }
    if (!os) throw io_error("CSV write failed");
}

inline std::vector<bench_row> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != csv_header())
        throw io_error("unrecognized CSV header");
    std::vector<bench_row> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 16) throw io_error("bad CSV row");
        bench_row r;
        r.corpus = f[0];
        r.scheme = f[1];
        r.alpha = std::stod(f[2]);
        r.seed = std::stoull(f[3]);
        r.n = std::stoull(f[4]);
        r.m = std::stoull(f[5]);
        r.m1 = std::stoull(f[6]);
        r.m2 = std::stoull(f[7]);
        r.m3 = std::stoull(f[8]);
        r.words = std::stoull(f[9]);
        r.ratio = std::stod(f[10]);
        r.access.samples = std::stoull(f[11]);
        r.access.visits_mean = std::stod(f[12]);
        r.access.visits_median = std::stod(f[13]);
        r.access.visits_p999 = std::stod(f[14]);
        r.access.visits_max = std::stod(f[15]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace ralz
