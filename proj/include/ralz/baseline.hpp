#pragma once

#include "format.hpp"
#include "lz78.hpp"
#include "spanner.hpp"

namespace ralz {

// Baseline stream: one packed word per phrase, footer, nothing else. Parent
// links are word offsets + 1, which for the 1-word stride coincide with
// phrase ordinals. No random access support by construction.

inline word_stream baseline_compress(const symbols& x, uint64_t n_max, alphabet a) {
    if (x.empty()) throw param_error("empty input");
    if (x.size() > n_max) throw capacity_error("input longer than n_max");
    check_symbols(x, a);
    stream_header h;
    h.scheme = scheme_kind::lz78;
    h.alpha = a;
    h.n_max = n_max;
    h.block_levels = spanner_config::for_capacity(n_max).block_levels;
    word_writer out(h);
    phrase_parser parser(a);
    for (symbol s : x) {
        if (auto ev = parser.push(s))
            out.write(simple_codeword{ev->parent_node, ev->sym});
    }
    if (auto tail = parser.finish()) out.write(simple_codeword{*tail, 0});
    return out.finalize(x.size());
}

inline std::vector<lz78_codeword> baseline_phrases(const stream_view& v) {
    std::vector<lz78_codeword> cws;
    cws.reserve(v.word_count);
    for (uint64_t off = 0; off < v.word_count; ++off) {
        auto cw = std::get<simple_codeword>(read_codeword_at(v, off).value);
        cws.push_back({cw.parent_link, cw.sym, true});
    }
    return cws;
}

inline symbols baseline_decompress(const stream_view& v) {
    if (v.header->scheme != scheme_kind::lz78)
        throw param_error("not a baseline stream");
    return lz78_decode(baseline_phrases(v), v.length);
}

}  // namespace ralz
