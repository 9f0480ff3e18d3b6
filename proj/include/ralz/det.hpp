#pragma once

#include <algorithm>
#include <span>

#include "format.hpp"
#include "lz78.hpp"
#include "spanner.hpp"
#include "trace.hpp"

namespace ralz {

// Deterministic scheme: every phrase becomes a fixed 3-word codeword carrying
// its start position, parent ordinal, a long-jump ancestor ordinal, and the
// new symbol. Exactly three times the baseline word count, and any symbol is
// reachable by a binary search plus a bounded walk over the two pointers.

inline word_stream det_compress(const symbols& x, uint64_t n_max, alphabet a) {
    if (x.empty()) throw param_error("empty input");
    if (x.size() > n_max) throw capacity_error("input longer than n_max");
    check_symbols(x, a);

    stream_header h;
    h.scheme = scheme_kind::deterministic;
    h.alpha = a;
    h.n_max = n_max;
    h.block_levels = spanner_config::for_capacity(n_max).block_levels;

    word_writer out(h);
    phrase_parser parser(a);
    auto emit = [&](std::span<const uint64_t> path, uint64_t parent,
                    uint64_t depth, symbol s, uint64_t start) {
        // The ancestor the long jump lands on, read off the root-to-parent
        // path of the phrase being emitted.
        uint64_t anc = path[jump_target(depth, h.block_levels)];
        out.write(det_codeword{start, parent, anc, s});
    };
    for (symbol s : x) {
        if (auto ev = parser.push(s))
            emit(parser.completed_path(), ev->parent_node, ev->depth, ev->sym,
                 ev->start);
    }
    if (auto tail = parser.finish()) {
        uint64_t depth = parser.depth_of(*tail) + 1;
        emit(parser.path(), *tail, depth, 0,
             x.size() - parser.depth_of(*tail) + 1);
    }
    return out.finalize(x.size());
}

namespace detail {

struct det_reader {
    const stream_view& v;
    access_trace* trace;

    uint64_t phrase_count() const { return v.word_count / 3; }

    uint64_t position(uint64_t index) const {
        if (trace) ++trace->codewords_read;
        return v.word(3 * (index - 1));
    }

    det_codeword read(uint64_t index) const {
        if (index == 0)
            throw malformed_stream_error("navigation reached the trie root");
        if (trace) ++trace->codewords_read;
        return std::get<det_codeword>(read_codeword_at(v, 3 * (index - 1)).value);
    }
};

// Binary search for the phrase containing position `pos`, then the start
// level/codeword to navigate from. Handles the final phrase, whose covered
// length can be one less than its node depth when the input ended mid-match.
struct det_locate {
    uint64_t index;        // phrase containing pos
    uint64_t start;        // its start position
    uint64_t nav_index;    // node to navigate from
    uint64_t nav_level;    // its depth
};

inline det_locate locate(const det_reader& r, uint64_t pos) {
    uint64_t m = r.phrase_count();
    uint64_t lo = 1, hi = m;
    while (lo < hi) {
        uint64_t mid = lo + (hi - lo + 1) / 2;
        if (r.trace) ++r.trace->search_reads;
        if (r.position(mid) <= pos)
            lo = mid;
        else
            hi = mid - 1;
    }
    uint64_t p_t = r.position(lo);
    uint64_t covered = (lo < m ? r.position(lo + 1) : r.v.length + 1) - p_t;
    if (lo == m) {
        det_codeword last = r.read(m);
        uint64_t parent_depth =
            last.parent_index == 0
                ? 0
                : (last.parent_index < m ? r.position(last.parent_index + 1)
                                         : r.v.length + 1) -
                      r.position(last.parent_index);
        if (parent_depth == covered)  // truncated final phrase
            return {m, p_t, last.parent_index, covered};
    }
    return {lo, p_t, lo, covered};
}

inline std::pair<uint64_t, det_codeword> det_find_from(const det_reader& r,
                                                       const det_locate& loc,
                                                       uint64_t pos) {
    uint64_t target = pos - loc.start + 1;
    uint64_t cur = loc.nav_index;
    det_codeword cw = r.read(cur);
    uint32_t L = r.v.header->block_levels;
    navigate(
        loc.nav_level, target, L,
        [&] {
            cur = cw.parent_index;
            cw = r.read(cur);
            if (r.trace) ++r.trace->parent_hops;
        },
        [&] {
            cur = cw.ancestor_index;
            cw = r.read(cur);
            if (r.trace) ++r.trace->spanner_hops;
        },
        [&](uint64_t level) { return jump_target(level, L); });
    return {cur, cw};
}

inline std::pair<uint64_t, det_codeword> det_find(const det_reader& r,
                                                  uint64_t pos) {
    return det_find_from(r, locate(r, pos), pos);
}

}  // namespace detail

inline symbol det_access(const stream_view& v, uint64_t pos,
                         access_trace* trace = nullptr) {
    if (v.header->scheme != scheme_kind::deterministic)
        throw param_error("not a deterministic-scheme stream");
    if (pos < 1 || pos > v.length) throw bounds_error("position out of range");
    detail::det_reader r{v, trace};
    return detail::det_find(r, pos).second.sym;
}

inline symbols det_extract(const stream_view& v, uint64_t lo, uint64_t hi,
                           access_trace* trace = nullptr) {
    if (v.header->scheme != scheme_kind::deterministic)
        throw param_error("not a deterministic-scheme stream");
    if (lo < 1 || hi > v.length || lo > hi)
        throw bounds_error("range out of bounds");
    detail::det_reader r{v, trace};
    detail::det_locate loc = detail::locate(r, hi);
    auto [idx, cw] = detail::det_find_from(r, loc, hi);
    // Collect right-to-left: parent links inside a phrase, then the phrase
    // before it, fully expanding as far down as `lo`.
    symbols out;
    out.reserve(hi - lo + 1);
    uint64_t phrase = loc.index;
    uint64_t pos = hi;
    while (true) {
        out.push_back(cw.sym);
        if (pos == lo) break;
        --pos;
        if (cw.parent_index != 0) {
            idx = cw.parent_index;
            cw = r.read(idx);
            if (trace) ++trace->parent_hops;
        } else {
            --phrase;
            idx = phrase;
            cw = r.read(idx);
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline symbols det_decompress(const stream_view& v) {
    if (v.header->scheme != scheme_kind::deterministic)
        throw param_error("not a deterministic-scheme stream");
    std::vector<lz78_codeword> cws;
    uint64_t m = v.word_count / 3;
    if (v.word_count % 3 != 0)
        throw malformed_stream_error("stream is not a whole number of codewords");
    cws.reserve(m);
    for (uint64_t i = 1; i <= m; ++i) {
        auto cw = std::get<det_codeword>(read_codeword_at(v, 3 * (i - 1)).value);
        cws.push_back({cw.parent_index, cw.sym, true});
    }
    return lz78_decode(cws, v.length);
}

}  // namespace ralz
