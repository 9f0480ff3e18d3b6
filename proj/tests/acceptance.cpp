// Acceptance suite: runs every contract the toolkit commits to, one line of
// output per criterion. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include <ralz/ralz.hpp>

using namespace ralz;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail,
            clock_type::time_point t0) {
    double secs =
        std::chrono::duration<double>(clock_type::now() - t0).count();
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": "
              << label << " — " << detail << " (" << std::fixed
              << std::setprecision(1) << secs << "s)" << std::endl;
    if (!ok) ++failures;
}

struct corpus {
    std::string name;
    symbols data;
    alphabet alpha;
};

std::vector<corpus> roundtrip_corpora() {
    std::vector<corpus> cs;
    for (uint64_t n : {1000, 100000, 1000000}) {
        cs.push_back({"random-bit-" + std::to_string(n), gen_random(n, n, alphabet::bit),
                      alphabet::bit});
        cs.push_back({"random-byte-" + std::to_string(n),
                      gen_random(n, n + 1, alphabet::byte), alphabet::byte});
    }
    cs.push_back({"repetitive", gen_repetitive(50000, 37, 7, alphabet::byte),
                  alphabet::byte});
    cs.push_back({"figure", bits_from_string("000101110010101101110000000"),
                  alphabet::bit});
    cs.push_back({"enum-k10", gen_lb_s(10), alphabet::bit});
    cs.push_back({"file-log", gen_loglike(200000, 8), alphabet::byte});
    cs.push_back({"file-dna", gen_dnalike(200000, 9), alphabet::byte});
    cs.push_back({"file-vocab", gen_vocablike(200000, 10), alphabet::byte});
    return cs;
}

std::vector<corpus> dense_corpora() {
    // Inputs with at least 10^4 baseline phrases.
    return {
        {"random-bit-200k", gen_random(200000, 41, alphabet::bit), alphabet::bit},
        {"random-byte-100k", gen_random(100000, 42, alphabet::byte), alphabet::byte},
        {"log-300k", gen_loglike(300000, 43), alphabet::byte},
    };
}

bool same_phrases(const std::vector<lz78_codeword>& a,
                  const std::vector<lz78_codeword>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].parent != b[i].parent) return false;
        if (a[i].has_symbol && b[i].has_symbol && a[i].sym != b[i].sym) return false;
    }
    return true;
}

scheme_params eps_params(double eps, uint64_t n_max, alphabet a, uint64_t seed) {
    return scheme_params::from_epsilon(eps, n_max, a, seed);
}

void criterion_roundtrip(const std::vector<corpus>& cs) {
    auto t0 = clock_type::now();
    uint64_t cases = 0;
    std::string fail;
    for (const corpus& c : cs) {
        word_stream base = baseline_compress(c.data, c.data.size(), c.alpha);
        word_stream det = det_compress(c.data, c.data.size(), c.alpha);
        word_stream rnd = rand_compress(c.data, eps_params(0.25, c.data.size(), c.alpha, 11));
        if (baseline_decompress(view_of(base)) != c.data)
            fail += " lz78:" + c.name;
        if (det_decompress(view_of(det)) != c.data) fail += " det:" + c.name;
        if (rand_decompress(view_of(rnd)) != c.data) fail += " rand:" + c.name;
        cases += 3;
    }
    report(1, "roundtrip exactness", fail.empty(),
           fail.empty() ? std::to_string(cases) + " scheme/corpus cases exact"
                        : "mismatch at" + fail,
           t0);
}

void criterion_phrase_invariance(const std::vector<corpus>& cs) {
    auto t0 = clock_type::now();
    uint64_t cases = 0;
    std::string fail;
    for (const corpus& c : cs) {
        auto reference = lz78_encode(c.data, c.alpha);
        word_stream base = baseline_compress(c.data, c.data.size(), c.alpha);
        if (!same_phrases(reference, baseline_phrases(view_of(base))))
            fail += " lz78:" + c.name;
        word_stream det = det_compress(c.data, c.data.size(), c.alpha);
        std::vector<lz78_codeword> det_seq;
        for (uint64_t off = 0; off + 2 < view_of(det).word_count; off += 3) {
            auto cw = std::get<det_codeword>(read_codeword_at(view_of(det), off).value);
            det_seq.push_back({cw.parent_index, cw.sym, true});
        }
        if (!same_phrases(reference, det_seq)) fail += " det:" + c.name;
        for (uint64_t seed : {1, 2, 3}) {
            word_stream rnd =
                rand_compress(c.data, eps_params(0.5, c.data.size(), c.alpha, seed));
            if (!same_phrases(reference, rand_phrases(view_of(rnd))))
                fail += " rand-seed" + std::to_string(seed) + ":" + c.name;
            ++cases;
        }
        cases += 2;
    }
    report(2, "phrase invariance across schemes and seeds", fail.empty(),
           fail.empty() ? std::to_string(cases) + " streams share the parse"
                        : "diverged at" + fail,
           t0);
}

void criterion_det_competitive(const std::vector<corpus>& cs) {
    auto t0 = clock_type::now();
    std::string fail;
    for (const corpus& c : cs) {
        uint64_t m = lz78_parse(c.data, c.alpha).size();
        word_stream det = det_compress(c.data, c.data.size(), c.alpha);
        if (det.payload_words() != 3 * m) fail += " " + c.name;
    }
    report(3, "deterministic word count = 3x baseline", fail.empty(),
           fail.empty() ? "exact identity on every corpus" : "violated at" + fail,
           t0);
}

void criterion_rand_competitive(const std::vector<corpus>& dense) {
    auto t0 = clock_type::now();
    std::ostringstream detail;
    bool ok = true;
    for (const corpus& c : dense) {
        uint64_t m = lz78_parse(c.data, c.alpha).size();
        if (m < 10000) {
            ok = false;
            detail << c.name << " has only " << m << " phrases; ";
            continue;
        }
        for (double eps : {0.5, 0.25, 0.125}) {
            int competitive = 0, accounted = 0;
            for (uint64_t seed = 1; seed <= 20; ++seed) {
                online_compressor comp(eps_params(eps, c.data.size(), c.alpha, seed));
                for (symbol s : c.data) comp.push(s);
                word_stream ws = comp.finalize();
                auto counts = comp.counts();
                if (ws.payload_words() ==
                        counts.simple + 5 * counts.special + 2 * counts.anchor &&
                    counts.simple + counts.special == m)
                    ++accounted;
                if (double(ws.payload_words()) <= (1.0 + eps) * double(m))
                    ++competitive;
            }
            if (competitive < 19 || accounted != 20) {
                ok = false;
                detail << c.name << " eps=" << eps << " competitive " << competitive
                       << "/20 accounted " << accounted << "/20; ";
            }
        }
    }
    report(4, "randomized competitiveness over 20 seeds", ok,
           ok ? "word bound in >=19/20 runs, accounting identity in 20/20"
              : detail.str(),
           t0);
}

void criterion_access_correctness() {
    auto t0 = clock_type::now();
    std::string fail;
    for (alphabet a : {alphabet::bit, alphabet::byte}) {
        symbols x = gen_random(10000, a == alphabet::bit ? 21 : 22, a);
        word_stream det = det_compress(x, x.size(), a);
        stream_view dv = view_of(det);
        for (uint64_t pos = 1; pos <= x.size(); ++pos)
            if (det_access(dv, pos) != x[pos - 1]) {
                fail += " det-exhaustive";
                break;
            }
        for (uint64_t seed = 1; seed <= 5; ++seed) {
            word_stream rnd = rand_compress(x, eps_params(0.25, x.size(), a, seed));
            stream_view rv = view_of(rnd);
            for (uint64_t pos = 1; pos <= x.size(); ++pos)
                if (rand_access(rv, pos) != x[pos - 1]) {
                    fail += " rand-exhaustive-seed" + std::to_string(seed);
                    break;
                }
        }
    }
    {
        symbols x = gen_random(1000000, 5, alphabet::bit);
        word_stream det = det_compress(x, x.size(), alphabet::bit);
        word_stream rnd = rand_compress(x, eps_params(0.25, x.size(), alphabet::bit, 9));
        splitmix64 rng(77);
        for (int i = 0; i < 1000; ++i) {
            uint64_t pos = 1 + rng.below(x.size());
            if (det_access(view_of(det), pos) != x[pos - 1]) {
                fail += " det-sampled";
                break;
            }
            if (rand_access(view_of(rnd), pos) != x[pos - 1]) {
                fail += " rand-sampled";
                break;
            }
        }
    }
    report(5, "access equals the decode oracle", fail.empty(),
           fail.empty() ? "exhaustive at 10^4, sampled at 10^6" : "failed:" + fail,
           t0);
}

void criterion_spanner() {
    auto t0 = clock_type::now();
    std::string fail;
    for (uint64_t n : {64, 256, 1024}) {
        uint32_t L = ceil_log2(n);
        uint64_t worst = 0;
        for (uint64_t t = 1; t < n && fail.empty(); ++t) {
            for (uint64_t r = 0; r < t; ++r) {
                uint64_t level = t, min_seen = t;
                uint64_t hops = navigate(
                    t, r, L,
                    [&] {
                        --level;
                        min_seen = std::min(min_seen, level);
                    },
                    [&] {
                        level = jump_target(level, L);
                        min_seen = std::min(min_seen, level);
                    },
                    [&](uint64_t l) { return jump_target(l, L); });
                worst = std::max(worst, hops);
                if (level != r || min_seen < r) {
                    fail = " wrong endpoint at n=" + std::to_string(n);
                    break;
                }
            }
        }
        if (worst > 4 * uint64_t(L))
            fail += " hop bound " + std::to_string(worst) + " > " +
                    std::to_string(4 * L) + " at n=" + std::to_string(n);
    }
    report(6, "spanner navigation bound", fail.empty(),
           fail.empty() ? "all pairs, n in {64,256,1024}, hops <= 4*ceil(log2 n)"
                        : fail,
           t0);
}

void criterion_access_cost() {
    auto t0 = clock_type::now();
    std::ostringstream detail;
    bool ok = true;
    const uint64_t n = 1000000;
    std::vector<corpus> cs = {
        {"random", gen_random(n, 5, alphabet::bit), alphabet::bit},
        {"ramp", gen_ramp(n), alphabet::bit},
    };
    double log2n = std::log2(double(n));
    for (const corpus& c : cs) {
        for (double eps : {0.5, 0.25, 0.125}) {
            word_stream ws = rand_compress(c.data, eps_params(eps, n, c.alpha, 31));
            stream_view v = view_of(ws);
            splitmix64 rng(13);
            std::vector<uint64_t> visits;
            visits.reserve(10000);
            bool correct = true;
            for (int i = 0; i < 10000; ++i) {
                uint64_t pos = 1 + rng.below(n);
                access_trace trace;
                if (rand_access(v, pos, &trace) != c.data[pos - 1]) correct = false;
                visits.push_back(trace.node_visits());
            }
            std::sort(visits.begin(), visits.end());
            double mean = 0;
            for (uint64_t x : visits) mean += double(x);
            mean /= double(visits.size());
            double p999 = double(visits[uint64_t(std::ceil(0.999 * 10000)) - 1]);
            double mean_bound = 50.0 * (log2n + 1.0 / (eps * eps));
            double tail_bound = 50.0 * log2n / (eps * eps);
            if (!correct || mean > mean_bound || p999 > tail_bound) {
                ok = false;
                detail << c.name << " eps=" << eps << " mean " << mean << "/"
                       << mean_bound << " p999 " << p999 << "/" << tail_bound << "; ";
            }
        }
    }
    report(7, "instrumented access cost", ok,
           ok ? "mean <= 50(log2 n + 1/e^2), p99.9 <= 50 log2(n)/e^2, random+ramp"
              : detail.str(),
           t0);
}

void criterion_extract_cost() {
    auto t0 = clock_type::now();
    std::ostringstream detail;
    bool ok = true;
    symbols x = gen_random(1000000, 5, alphabet::bit);
    word_stream det = det_compress(x, x.size(), alphabet::bit);
    word_stream rnd = rand_compress(x, eps_params(0.5, x.size(), alphabet::bit, 31));
    splitmix64 rng(19);
    for (uint64_t span : {1, 10, 100, 1000}) {
        for (int i = 0; i < 25; ++i) {
            uint64_t lo = 1 + rng.below(x.size() - span);
            uint64_t hi = lo + span;
            for (int scheme = 0; scheme < 2; ++scheme) {
                stream_view v = view_of(scheme == 0 ? det : rnd);
                access_trace ext, one;
                symbols part = scheme == 0 ? det_extract(v, lo, hi, &ext)
                                           : rand_extract(v, lo, hi, &ext);
                symbol last = scheme == 0 ? det_access(v, hi, &one)
                                          : rand_access(v, hi, &one);
                symbols want(x.begin() + lo - 1, x.begin() + hi);
                if (part != want || last != x[hi - 1] ||
                    ext.codewords_read > one.codewords_read + 2 * span + 8) {
                    ok = false;
                    detail << (scheme == 0 ? "det" : "rand") << " s=" << span
                           << " touches " << ext.codewords_read << " > "
                           << one.codewords_read << "+2s+8; ";
                }
            }
        }
    }
    report(8, "extraction cost within access + 2s + 8", ok,
           ok ? "spans {1,10,100,1000}, both schemes" : detail.str(), t0);
}

void criterion_sweep(const std::vector<corpus>& dense) {
    auto t0 = clock_type::now();
    std::ostringstream detail;
    bool ok = true;
    const std::vector<double> alphas = {0.0, 1.0 / 16, 1.0 / 8, 1.0 / 4};
    for (const corpus& c : dense) {
        uint64_t m = lz78_parse(c.data, c.alpha).size();
        for (uint64_t seed : {1, 2, 3}) {
            std::vector<uint64_t> sizes;
            for (double alpha : alphas) {
                auto [num, den] = alpha_to_rational(alpha);
                scheme_params prm =
                    scheme_params::from_alpha(num, den, c.data.size(), c.alpha, seed);
                word_stream ws = rand_compress(c.data, prm);
                sizes.push_back(ws.payload_words());
                double ratio = double(ws.payload_words()) / double(m);
                double predicted = 1.0 + 4.0 * alpha + 2.0 / double(prm.anchor_words);
                if (ratio < 0.8 * predicted || ratio > 1.2 * predicted) {
                    ok = false;
                    detail << c.name << " a=" << alpha << " ratio " << ratio
                           << " vs " << predicted << "; ";
                }
            }
            for (size_t i = 1; i < sizes.size(); ++i)
                if (sizes[i] <= sizes[i - 1]) {
                    ok = false;
                    detail << c.name << " seed " << seed << " not increasing; ";
                }
        }
    }
    report(9, "alpha sweep shape", ok,
           ok ? "sizes strictly increase, ratios within 20% of 1+4a+2/B"
              : detail.str(),
           t0);
}

void criterion_lower_bound_family() {
    auto t0 = clock_type::now();
    std::ostringstream detail;
    bool ok = true;
    for (uint64_t k : {6, 8, 10}) {
        auto base = lz78_encode(gen_lb_s(k), alphabet::bit);
        uint64_t want = (uint64_t(1) << k) - 2;
        if (base.size() != want) {
            ok = false;
            detail << "k=" << k << " count " << base.size() << "; ";
            continue;
        }
        uint64_t q = (uint64_t(1) << (k - 1)) / 4;
        for (uint64_t ell = 1; ell <= q; ++ell) {
            auto mod = lz78_encode(gen_lb_s_ell(k, ell), alphabet::bit);
            if (mod.size() != want) {
                ok = false;
                detail << "k=" << k << " ell=" << ell << " count; ";
                continue;
            }
            uint64_t diff = 0;
            for (size_t i = 0; i < mod.size(); ++i)
                if (mod[i].parent != base[i].parent || mod[i].sym != base[i].sym)
                    ++diff;
            if (diff != 1) {
                ok = false;
                detail << "k=" << k << " ell=" << ell << " diff=" << diff << "; ";
            }
        }
    }
    report(10, "enumeration family differs in one codeword", ok,
           ok ? "k in {6,8,10}, every valid ell" : detail.str(), t0);
}

void criterion_online_contract() {
    auto t0 = clock_type::now();
    std::ostringstream detail;
    bool ok = true;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        symbols x = gen_random(11500, 60 + seed, alphabet::bit);
        auto phrases = lz78_parse(x, alphabet::bit);
        word_stream ws = rand_compress(x, eps_params(0.5, x.size(), alphabet::bit, seed));
        stream_view full = view_of(ws);
        uint64_t off = 0, covered = 0, phrase = 0;
        uint64_t boundaries = 0;
        depth_memo memo;  // depths are stable across prefixes of one stream
        memo.cap = size_t(1) << 22;
        while (off < full.word_count && ok) {
            decoded_codeword dc = read_codeword_at(full, off);
            if (!std::holds_alternative<position_codeword>(dc.value))
                covered += phrases[phrase++].length;
            off += dc.length;
            if (covered == 0) continue;
            ++boundaries;
            stream_view prefix = prefix_view(ws, off, covered);
            for (uint64_t pos = 1; pos <= covered; ++pos) {
                if (rand_access(prefix, pos, nullptr, &memo) != x[pos - 1]) {
                    ok = false;
                    detail << "seed " << seed << " prefix " << off << " pos " << pos
                           << "; ";
                    break;
                }
            }
        }
        if (ok && (phrase != phrases.size() || covered != x.size())) {
            ok = false;
            detail << "seed " << seed << " walk incomplete; ";
        }
        if (ok && boundaries < 900) {
            ok = false;
            detail << "seed " << seed << " only " << boundaries << " boundaries; ";
        }
    }
    report(11, "online contract at every codeword boundary", ok,
           ok ? "all prefixes serve every encoded position, 5 seeds" : detail.str(),
           t0);
}

}  // namespace

int main() {
    auto corpora = roundtrip_corpora();
    auto dense = dense_corpora();
    criterion_roundtrip(corpora);
    criterion_phrase_invariance(corpora);
    criterion_det_competitive(corpora);
    criterion_rand_competitive(dense);
    criterion_access_correctness();
    criterion_spanner();
    criterion_access_cost();
    criterion_extract_cost();
    criterion_sweep(dense);
    criterion_lower_bound_family();
    criterion_online_contract();
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures;
}
