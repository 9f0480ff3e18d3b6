#pragma once

#include <algorithm>
#include <span>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "format.hpp"
#include "lz78.hpp"
#include "spanner.hpp"
#include "trace.hpp"

namespace ralz {

// Randomized scheme. Phrases are parsed exactly as in the baseline; each one
// is encoded as a one-word simple codeword, or with probability p as a
// five-word special codeword that also stores the node's depth, its nearest
// special ancestor, and a long-jump special ancestor. A two-word position
// anchor is inserted whenever the output crosses a multiple of B words, so a
// binary search can land within O(B) words of any input position.

struct scheme_params {
    uint64_t n_max = 1;
    alphabet alpha = alphabet::byte;
    uint64_t seed = 0;
    uint64_t p_num = 0;  // special-codeword probability p_num/p_den
    uint64_t p_den = 1;
    uint32_t anchor_words = 40;  // B

    static scheme_params from_epsilon(double eps, uint64_t n_max, alphabet a,
                                      uint64_t seed) {
        if (!(eps > 0.0) || eps > 1.0)
            throw param_error("epsilon must be in (0, 1]");
        scheme_params prm;
        prm.n_max = n_max;
        prm.alpha = a;
        prm.seed = seed;
        // p = eps / 40, as an exact rational of the rounded epsilon.
        uint64_t num = uint64_t(std::llround(eps * 4294967296.0));
        uint64_t den = 40ull << 32;
        uint64_t g = std::gcd(num, den);
        prm.p_num = num / g;
        prm.p_den = den / g;
        prm.anchor_words = uint32_t(ceil_div(prm.p_den, prm.p_num));
        return prm;
    }

    // Direct special fraction. B tracks ceil(1/alpha) but is floored at 16:
    // anchors land every B output words, so a smaller B would make the
    // two-word anchors a first-order share of the stream and the overhead
    // would no longer follow the 1 + 4a + 2/B accounting.
    static scheme_params from_alpha(uint64_t num, uint64_t den, uint64_t n_max,
                                    alphabet a, uint64_t seed) {
        if (den == 0 || num > den) throw param_error("alpha must be in [0, 1]");
        scheme_params prm;
        prm.n_max = n_max;
        prm.alpha = a;
        prm.seed = seed;
        uint64_t g = num ? std::gcd(num, den) : 1;
        prm.p_num = num / g;
        prm.p_den = num ? den / g : 1;
        prm.anchor_words =
            num == 0 ? 40
                     : uint32_t(std::max<uint64_t>(16, ceil_div(prm.p_den, prm.p_num)));
        return prm;
    }

    // Below this threshold the overhead bound loses its high-probability
    // guarantee; compression and access stay correct regardless.
    std::optional<std::string> validate_warning() const {
        double eps = 40.0 * double(p_num) / double(p_den);
        double threshold =
            40.0 * double(ceil_log2(n_max)) / std::sqrt(double(n_max));
        if (p_num > 0 && eps < threshold)
            return "epsilon " + std::to_string(eps) +
                   " is below the guidance threshold " + std::to_string(threshold);
        return std::nullopt;
    }

    stream_header to_header() const {
        if (anchor_words < 3) throw param_error("anchor spacing must be at least 3");
        if (p_den == 0 || p_num > p_den) throw param_error("bad special fraction");
        stream_header h;
        h.scheme = scheme_kind::randomized;
        h.alpha = alpha;
        h.n_max = n_max;
        h.block_levels = spanner_config::for_capacity(n_max).block_levels;
        h.anchor_words = anchor_words;
        h.p_num = p_num;
        h.p_den = p_den;
        h.seed = seed;
        return h;
    }
};

// ---------------------------------------------------------------------------
// Online compressor. push() emits whole codewords; after every one the
// committed word count is published, so concurrent readers can access any
// position already encoded. finalize() appends the footer.
// ---------------------------------------------------------------------------

class online_compressor {
public:
    explicit online_compressor(const scheme_params& prm)
        : header_(prm.to_header()),
          out_(header_),
          parser_(header_.alpha),
          rng_(header_.seed) {
        node_link_.push_back(0);
        node_special_.push_back(0);
        next_boundary_ = header_.anchor_words;
        out_.write(position_codeword{1});  // block-0 anchor
        ++counts_.anchor;
        out_.commit();
    }

    struct word_counts {
        uint64_t simple = 0;
        uint64_t special = 0;
        uint64_t anchor = 0;
    };

    void push(symbol s) {
        if (finalized_) throw param_error("compressor already finalized");
        if (parser_.symbols_consumed() >= header_.n_max)
            throw capacity_error("input longer than n_max");
        if (auto ev = parser_.push(s)) {
            emit_phrase(parser_.completed_path(), ev->parent_node, ev->depth,
                        ev->sym, false);
            node_link_.push_back(last_offset_ + 1);
            node_special_.push_back(last_special_);
            publish(parser_.symbols_consumed());
        }
    }

    word_stream finalize() {
        if (finalized_) throw param_error("compressor already finalized");
        finalized_ = true;
        uint64_t n = parser_.symbols_consumed();
        if (n == 0) throw param_error("empty input");
        if (auto tail = parser_.finish())
            emit_phrase(parser_.path(), *tail, parser_.depth_of(*tail) + 1, 0,
                        true);
        word_stream s = out_.finalize(n);
        committed_symbols_.store(n, std::memory_order_release);
        return s;
    }

    const stream_header& header() const { return header_; }
    word_counts counts() const { return counts_; }
    uint64_t phrase_count() const { return parser_.node_count() - 1; }

    uint64_t committed_words() const { return out_.buffer().committed(); }

    // Consistent live view for concurrent readers: length first, then the
    // word count, matching the writer's publish order.
    stream_view committed_view() const {
        uint64_t len = committed_symbols_.load(std::memory_order_acquire);
        uint64_t count = out_.buffer().committed();
        return {&header_, count, len, nullptr, &out_.buffer()};
    }

private:
    void emit_phrase(std::span<const uint64_t> path, uint64_t parent_node,
                     uint64_t depth, symbol s, bool at_end) {
        bool special = rng_.coin(header_.p_num, header_.p_den);
        uint64_t parent_link = node_link_[parent_node];
        if (special) {
            // Specials along the root-to-parent path, ordered by special depth.
            specials_scratch_.clear();
            for (uint64_t node : path)
                if (node_special_[node]) specials_scratch_.push_back(node);
            uint64_t sd = specials_scratch_.size();
            uint64_t sp_link =
                sd == 0 ? 0 : node_link_[specials_scratch_.back()];
            uint64_t sa_link =
                sd == 0
                    ? 0
                    : node_link_[specials_scratch_[jump_target(sd, header_.block_levels)]];
            last_offset_ =
                out_.write(special_codeword{depth, parent_link, s, sp_link, sa_link});
            ++counts_.special;
        } else {
            last_offset_ = out_.write(simple_codeword{parent_link, s});
            ++counts_.simple;
        }
        last_special_ = special ? 1 : 0;
        maybe_anchor(at_end);
    }

    // One anchor per crossing event; the anchor itself can cross the next
    // boundary. When the crossing coincides with the end of the input the
    // footer serves as the final anchor.
    void maybe_anchor(bool at_end) {
        while (out_.offset() >= next_boundary_) {
            next_boundary_ =
                (out_.offset() / header_.anchor_words + 1) * header_.anchor_words;
            if (at_end) break;
            out_.write(position_codeword{parser_.symbols_consumed() + 1});
            ++counts_.anchor;
        }
    }

    void publish(uint64_t covered) {
        out_.commit();
        committed_symbols_.store(covered, std::memory_order_release);
    }

    stream_header header_;
    word_writer out_;
    phrase_parser parser_;
    splitmix64 rng_;
    std::vector<uint64_t> node_link_;  // node id -> emitted offset + 1
    std::vector<uint8_t> node_special_;
    std::vector<uint64_t> specials_scratch_;
    uint64_t next_boundary_ = 0;
    uint64_t last_offset_ = 0;
    uint8_t last_special_ = 0;
    word_counts counts_;
    std::atomic<uint64_t> committed_symbols_{0};
    bool finalized_ = false;
};

inline word_stream rand_compress(const symbols& x, const scheme_params& prm) {
    if (x.empty()) throw param_error("empty input");
    if (x.size() > prm.n_max) throw capacity_error("input longer than n_max");
    check_symbols(x, prm.alpha);
    online_compressor c(prm);
    for (symbol s : x) c.push(s);
    return c.finalize();
}

// ---------------------------------------------------------------------------
// Random access
// ---------------------------------------------------------------------------

// Per-operation cache of already-computed node depths. Walking up to a
// special node fills it for every node passed, so shared path segments are
// climbed at most once per access.
struct depth_memo {
    std::unordered_map<uint64_t, uint64_t> map;
    size_t cap = size_t(1) << 20;

    std::optional<uint64_t> get(uint64_t off) const {
        auto it = map.find(off);
        if (it == map.end()) return std::nullopt;
        return it->second;
    }
    void put(uint64_t off, uint64_t depth) {
        if (map.size() < cap) map.emplace(off, depth);
    }
};

namespace detail {

struct rand_reader {
    const stream_view& v;
    access_trace* trace;

    decoded_codeword read(uint64_t off) const {
        if (trace) ++trace->codewords_read;
        return read_codeword_at(v, off);
    }
};

inline uint64_t parent_link_of(const codeword& cw) {
    if (auto* s = std::get_if<simple_codeword>(&cw)) return s->parent_link;
    if (auto* s = std::get_if<special_codeword>(&cw)) return s->parent_link;
    throw malformed_stream_error("codeword has no parent link");
}

inline symbol symbol_of(const codeword& cw) {
    if (auto* s = std::get_if<simple_codeword>(&cw)) return s->sym;
    if (auto* s = std::get_if<special_codeword>(&cw)) return s->sym;
    throw malformed_stream_error("codeword has no symbol");
}

inline uint64_t rand_find_depth(const rand_reader& r, uint64_t off,
                                depth_memo* memo,
                                const codeword* predecoded = nullptr) {
    std::vector<uint64_t> walked;
    uint64_t base = 0;
    uint64_t cur = off;
    const codeword* cw = predecoded;
    codeword storage;
    while (true) {
        if (memo) {
            if (auto hit = memo->get(cur)) {
                base = *hit;
                break;
            }
        }
        if (!cw) {
            storage = r.read(cur).value;
            cw = &storage;
        }
        if (auto* sp = std::get_if<special_codeword>(cw)) {
            base = sp->depth;
            if (memo) memo->put(cur, base);
            break;
        }
        uint64_t link = parent_link_of(*cw);
        walked.push_back(cur);
        cw = nullptr;
        if (link == 0) {
            base = 0;
            break;
        }
        cur = link - 1;
        if (r.trace) ++r.trace->parent_hops;
    }
    if (memo)
        for (size_t i = 0; i < walked.size(); ++i)
            memo->put(walked[i], base + (walked.size() - i));
    return base + walked.size();
}

// Depth of the node a special-ancestor link points at (0 for the root).
inline uint64_t link_target_depth(const rand_reader& r, uint64_t link) {
    if (link == 0) return 0;
    auto cw = r.read(link - 1);
    auto* sp = std::get_if<special_codeword>(&cw.value);
    if (!sp)
        throw malformed_stream_error("special link points at a non-special codeword");
    return sp->depth;
}

struct found_node {
    uint64_t offset;
    codeword value;
};

// Ancestor of the node at `off` (depth `depth`) at tree depth d. Climbs to
// the first special node, aligns on the special chain until the long-jump
// targets reverse direction (which marks a block boundary), then descends
// the special spanner greedily, and finishes with parent edges. Every move
// checks depths, so the walk never lands below d.
inline found_node rand_find_node_by_depth(const rand_reader& r, uint64_t off,
                                          uint64_t depth, uint64_t d) {
    if (d < 1 || d > depth) throw bounds_error("target depth out of range");
    uint64_t cur = off;
    uint64_t cdepth = depth;
    codeword cw = r.read(cur).value;

    // Phase 1: plain climb to depth d or to the first special node.
    while (!std::holds_alternative<special_codeword>(cw)) {
        if (cdepth == d) return {cur, cw};
        uint64_t link = parent_link_of(cw);
        if (link == 0)
            throw malformed_stream_error("parent chain ended above the target depth");
        cur = link - 1;
        cw = r.read(cur).value;
        --cdepth;
        if (r.trace) ++r.trace->parent_hops;
    }
    {
        auto& sp = std::get<special_codeword>(cw);
        if (sp.depth != cdepth)
            throw malformed_stream_error("stored depth disagrees with the climb");
    }
    if (cdepth == d) return {cur, cw};

    uint32_t L = r.v.header->block_levels;

    // Phase 2: alignment. Within a block, each step up the special chain
    // moves the long-jump target deeper; the first step that pulls it back
    // toward the root lands exactly on a block boundary.
    uint64_t tu = link_target_depth(r, std::get<special_codeword>(cw).special_ancestor_link);
    for (uint32_t i = 0; i < L; ++i) {
        uint64_t qlink = std::get<special_codeword>(cw).special_parent_link;
        if (qlink == 0) break;
        auto qcw = r.read(qlink - 1).value;
        auto* qsp = std::get_if<special_codeword>(&qcw);
        if (!qsp)
            throw malformed_stream_error("special link points at a non-special codeword");
        if (qsp->depth < d) break;
        if (qsp->depth >= cdepth)
            throw malformed_stream_error("special chain does not descend");
        uint64_t tq = link_target_depth(r, qsp->special_ancestor_link);
        cur = qlink - 1;
        cw = qcw;
        cdepth = qsp->depth;
        if (r.trace) ++r.trace->spanner_hops;
        if (tq < tu) break;  // reversal: aligned
        tu = tq;
        if (cdepth == d) return {cur, cw};
    }
    if (cdepth == d) return {cur, cw};

    // Phase 3: greedy spanner descent with depth-based overshoot checks.
    while (cdepth > d) {
        auto& sp = std::get<special_codeword>(cw);
        uint64_t next_link = sp.special_parent_link;
        if (next_link == 0) break;
        auto next_cw = r.read(next_link - 1).value;
        auto* next_sp = std::get_if<special_codeword>(&next_cw);
        if (!next_sp)
            throw malformed_stream_error("special link points at a non-special codeword");
        if (next_sp->depth >= cdepth)
            throw malformed_stream_error("special chain does not descend");
        if (next_sp->depth < d) break;  // nearest special above is past the target
        uint64_t jump_link = sp.special_ancestor_link;
        bool jumped = false;
        if (jump_link != 0) {
            auto jump_cw = r.read(jump_link - 1).value;
            auto* jump_sp = std::get_if<special_codeword>(&jump_cw);
            if (!jump_sp)
                throw malformed_stream_error("special link points at a non-special codeword");
            if (jump_sp->depth >= cdepth)
                throw malformed_stream_error("long jump does not descend");
            if (jump_sp->depth >= d) {
                cur = jump_link - 1;
                cw = jump_cw;
                cdepth = jump_sp->depth;
                jumped = true;
            }
        }
        if (!jumped) {
            cur = next_link - 1;
            cw = next_cw;
            cdepth = next_sp->depth;
        }
        if (r.trace) ++r.trace->spanner_hops;
    }

    // Phase 4: the rest on parent edges.
    while (cdepth > d) {
        uint64_t link = parent_link_of(cw);
        if (link == 0)
            throw malformed_stream_error("parent chain ended above the target depth");
        cur = link - 1;
        cw = r.read(cur).value;
        --cdepth;
        if (r.trace) ++r.trace->parent_hops;
    }
    return {cur, cw};
}

struct located_phrase {
    uint64_t cw_offset;  // codeword encoding the phrase containing pos
    uint64_t start;      // phrase start position
    uint64_t depth;      // trie depth of the codeword's node
};

inline located_phrase locate_phrase(const rand_reader& r, uint64_t pos,
                                    depth_memo* memo) {
    const stream_view& v = r.v;
    uint32_t B = v.header->anchor_words;
    uint64_t scan_off = 0;
    uint64_t p = 1;
    if (v.word_count > 0) {
        // Rightmost block whose anchor position is <= pos. Blocks with no
        // anchor only occur past the last emitted one, so they order as
        // "greater" and the search stays monotone.
        uint64_t lo = 0, hi = v.word_count / B, best_off = 0;
        bool have = false;
        while (lo <= hi) {
            uint64_t mid = lo + (hi - lo) / 2;
            if (r.trace) {
                ++r.trace->search_reads;
                ++r.trace->codewords_read;
            }
            auto off = find_position_codeword(v, mid);
            uint64_t val = off ? v.word(*off + 1) : ~uint64_t(0);
            if (off && val <= pos) {
                best_off = *off;
                have = true;
                lo = mid + 1;
            } else {
                if (mid == 0) break;
                hi = mid - 1;
            }
        }
        if (have) {
            scan_off = best_off + 2;
            p = v.word(best_off + 1);
        }
    }
    // Sequential scan for the phrase containing pos.
    uint64_t off = scan_off;
    while (true) {
        if (off >= v.word_count)
            throw malformed_stream_error("scan ran past the end of the stream");
        decoded_codeword dc = r.read(off);
        if (std::holds_alternative<position_codeword>(dc.value)) {
            off += dc.length;
            continue;
        }
        uint64_t d = rand_find_depth(r, off, memo, &dc.value);
        if (p + d <= pos) {
            p += d;
            off += dc.length;
        } else {
            return {off, p, d};
        }
    }
}

}  // namespace detail

inline symbol rand_access(const stream_view& v, uint64_t pos,
                          access_trace* trace = nullptr,
                          depth_memo* memo = nullptr) {
    if (v.header->scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    if (pos < 1 || pos > v.length) throw bounds_error("position out of range");
    detail::rand_reader r{v, trace};
    depth_memo local;
    if (!memo) memo = &local;
    auto loc = detail::locate_phrase(r, pos, memo);
    auto node = detail::rand_find_node_by_depth(r, loc.cw_offset, loc.depth,
                                                pos - loc.start + 1);
    return detail::symbol_of(node.value);
}

inline uint64_t find_depth(const stream_view& v, uint64_t offset,
                           access_trace* trace = nullptr,
                           depth_memo* memo = nullptr) {
    if (v.header->scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    detail::rand_reader r{v, trace};
    return detail::rand_find_depth(r, offset, memo);
}

inline uint64_t find_node_by_depth(const stream_view& v, uint64_t offset,
                                   uint64_t d, access_trace* trace = nullptr,
                                   depth_memo* memo = nullptr) {
    if (v.header->scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    detail::rand_reader r{v, trace};
    depth_memo local;
    if (!memo) memo = &local;
    uint64_t depth = detail::rand_find_depth(r, offset, memo);
    return detail::rand_find_node_by_depth(r, offset, depth, d).offset;
}

inline symbols rand_extract(const stream_view& v, uint64_t lo, uint64_t hi,
                            access_trace* trace = nullptr) {
    if (v.header->scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    if (lo < 1 || hi > v.length || lo > hi)
        throw bounds_error("range out of bounds");
    detail::rand_reader r{v, trace};
    depth_memo memo;
    auto loc = detail::locate_phrase(r, hi, &memo);
    auto node = detail::rand_find_node_by_depth(r, loc.cw_offset, loc.depth,
                                                hi - loc.start + 1);

    // Collect right-to-left. Inside a phrase, parent links walk the symbols
    // backward; when a phrase is exhausted the codeword just before it is
    // found by parsing backward from its offset (delimiters make codeword
    // ends unambiguous), skipping anchors.
    symbols out;
    out.reserve(hi - lo + 1);
    uint64_t pos = hi;
    uint64_t phrase_off = loc.cw_offset;
    uint64_t cur = node.offset;
    codeword cw = node.value;
    while (true) {
        out.push_back(detail::symbol_of(cw));
        if (pos == lo) break;
        --pos;
        uint64_t plink = detail::parent_link_of(cw);
        if (plink != 0) {
            cur = plink - 1;
            cw = r.read(cur).value;
            if (trace) ++trace->parent_hops;
        } else {
            uint64_t end = phrase_off;
            while (true) {
                uint64_t begin;
                if (end >= 5 && v.word(end - 5) == v.header->delim_special())
                    begin = end - 5;
                else if (end >= 2 && v.word(end - 2) == v.header->delim_position())
                    begin = end - 2;
                else if (end >= 1)
                    begin = end - 1;
                else
                    throw malformed_stream_error("walked past the stream start");
                if (v.word(begin) == v.header->delim_position()) {
                    if (trace) ++trace->codewords_read;
                    end = begin;  // anchor: keep stepping back
                    continue;
                }
                phrase_off = begin;
                break;
            }
            cur = phrase_off;
            cw = r.read(cur).value;
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline symbols rand_decompress(const stream_view& v) {
    if (v.header->scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    std::vector<lz78_codeword> cws;
    std::unordered_map<uint64_t, uint64_t> ordinal_at;  // offset -> phrase ordinal
    uint64_t off = 0;
    while (off < v.word_count) {
        decoded_codeword dc = read_codeword_at(v, off);
        if (!std::holds_alternative<position_codeword>(dc.value)) {
            uint64_t link = detail::parent_link_of(dc.value);
            uint64_t parent = 0;
            if (link != 0) {
                auto it = ordinal_at.find(link - 1);
                if (it == ordinal_at.end())
                    throw malformed_stream_error("parent link misses a codeword boundary");
                parent = it->second;
            }
            cws.push_back({parent, detail::symbol_of(dc.value), true});
            ordinal_at.emplace(off, cws.size());
        }
        off += dc.length;
    }
    return lz78_decode(cws, v.length);
}

// Decodes all complete codewords of a footer-less prefix, dropping a
// trailing partial codeword. Returns the covered input prefix.
inline symbols rand_decompress_prefix(const stream_header& h,
                                      const std::vector<uint64_t>& words) {
    if (h.scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    stream_view v{&h, words.size(), 0, words.data(), nullptr};
    std::vector<lz78_codeword> cws;
    std::unordered_map<uint64_t, uint64_t> ordinal_at;
    std::vector<uint64_t> depths{0};
    uint64_t covered = 0;
    uint64_t off = 0;
    while (off < v.word_count) {
        decoded_codeword dc;
        try {
            dc = read_codeword_at(v, off);
        } catch (const truncation_error&) {
            break;  // partial trailing codeword
        }
        if (!std::holds_alternative<position_codeword>(dc.value)) {
            uint64_t link = detail::parent_link_of(dc.value);
            uint64_t parent = 0;
            if (link != 0) {
                auto it = ordinal_at.find(link - 1);
                if (it == ordinal_at.end())
                    throw malformed_stream_error("parent link misses a codeword boundary");
                parent = it->second;
            }
            cws.push_back({parent, detail::symbol_of(dc.value), true});
            ordinal_at.emplace(off, cws.size());
            depths.push_back(depths[parent] + 1);
            covered += depths.back();
        }
        off += dc.length;
    }
    return lz78_decode(cws, covered);
}

// The (parent ordinal, symbol) sequence, for cross-scheme comparisons.
inline std::vector<lz78_codeword> rand_phrases(const stream_view& v) {
    std::vector<lz78_codeword> cws;
    std::unordered_map<uint64_t, uint64_t> ordinal_at;
    uint64_t off = 0;
    while (off < v.word_count) {
        decoded_codeword dc = read_codeword_at(v, off);
        if (!std::holds_alternative<position_codeword>(dc.value)) {
            uint64_t link = detail::parent_link_of(dc.value);
            uint64_t parent = link == 0 ? 0 : ordinal_at.at(link - 1);
            cws.push_back({parent, detail::symbol_of(dc.value), true});
            ordinal_at.emplace(off, cws.size());
        }
        off += dc.length;
    }
    return cws;
}

// ---------------------------------------------------------------------------
// Full-stream audit: re-derives every structural invariant of a randomized
// stream. Used by verification and tests; not on the access hot path.
// ---------------------------------------------------------------------------

struct audit_report {
    uint64_t simple = 0;
    uint64_t special = 0;
    uint64_t anchor = 0;
    uint64_t phrases = 0;
};

inline audit_report audit_stream(const stream_view& v) {
    if (v.header->scheme != scheme_kind::randomized)
        throw param_error("not a randomized-scheme stream");
    const stream_header& h = *v.header;
    struct node_info {
        uint64_t depth = 0;
        uint64_t special_depth = 0;
        bool special = false;
        uint64_t nearest_special = 0;  // offset + 1 of deepest special ancestor
        uint64_t sp_link = 0;
    };
    std::unordered_map<uint64_t, node_info> nodes;
    audit_report rep;
    uint64_t off = 0;
    uint64_t covered = 0;
    uint64_t last_anchor_pos = 0;
    std::optional<uint64_t> pending_anchor;
    while (off < v.word_count) {
        decoded_codeword dc = read_codeword_at(v, off);
        if (auto* pc = std::get_if<position_codeword>(&dc.value)) {
            if (pc->position < last_anchor_pos)
                throw malformed_stream_error("anchor positions decrease");
            last_anchor_pos = pc->position;
            pending_anchor = pc->position;
            ++rep.anchor;
            off += dc.length;
            continue;
        }
        node_info info;
        uint64_t plink = detail::parent_link_of(dc.value);
        const node_info* parent = nullptr;
        if (plink != 0) {
            auto it = nodes.find(plink - 1);
            if (it == nodes.end())
                throw malformed_stream_error("parent link misses a codeword boundary");
            parent = &it->second;
        }
        info.depth = (parent ? parent->depth : 0) + 1;
        if (pending_anchor && *pending_anchor != covered + 1)
            throw malformed_stream_error("anchor does not match the next phrase start");
        pending_anchor.reset();
        if (auto* sp = std::get_if<special_codeword>(&dc.value)) {
            if (sp->depth != info.depth)
                throw malformed_stream_error("stored depth is wrong");
            info.special = true;
            uint64_t expect_sp = parent ? parent->nearest_special : 0;
            if (sp->special_parent_link != expect_sp)
                throw malformed_stream_error("special parent is not the nearest special ancestor");
            info.special_depth = expect_sp == 0
                                     ? 0
                                     : nodes.at(expect_sp - 1).special_depth + 1;
            info.sp_link = sp->special_parent_link;
            // The long jump must land on the special ancestor whose special
            // depth is the jump target of this node's.
            uint64_t jt = jump_target(info.special_depth, h.block_levels);
            uint64_t expect_sa = 0;
            if (info.special_depth > 0) {
                uint64_t walk = expect_sp;
                uint64_t wd = info.special_depth - 1;
                while (wd > jt) {
                    walk = nodes.at(walk - 1).sp_link;
                    --wd;
                }
                expect_sa = walk;
            }
            if (sp->special_ancestor_link != expect_sa)
                throw malformed_stream_error("long-jump ancestor is wrong");
            ++rep.special;
        } else {
            ++rep.simple;
        }
        info.nearest_special =
            info.special ? off + 1 : (parent ? parent->nearest_special : 0);
        nodes.emplace(off, info);
        ++rep.phrases;
        covered += info.depth;
        off += dc.length;
    }
    // A final phrase that matched an existing phrase expands one symbol past
    // the footer length; anything else is corruption.
    if (covered != v.length && covered != v.length + 1)
        throw malformed_stream_error("phrase lengths do not add up to the footer");
    return rep;
}

}  // namespace ralz
