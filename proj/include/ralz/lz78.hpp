#pragma once

#include <optional>
#include <span>
#include <unordered_map>

#include "common.hpp"

namespace ralz {

// One parsed phrase. `parent` is the ordinal of the longest proper-prefix
// phrase (0 = empty phrase at the trie root). A phrase missing its symbol can
// only be the last one: the input ended while it exactly matched an existing
// phrase.
struct phrase {
    uint64_t parent = 0;
    symbol sym = 0;
    bool has_symbol = true;
    uint64_t start = 0;   // 1-based position in the input
    uint64_t length = 0;  // symbols covered
};

struct lz78_codeword {
    uint64_t parent = 0;
    symbol sym = 0;
    bool has_symbol = true;
};

// ---------------------------------------------------------------------------
// Incremental greedy parser over the shared phrase trie.
//
// Node ids equal phrase ordinals (root = 0), so schemes can keep per-phrase
// side arrays indexed by node id. The root-to-current path is exposed so a
// compressor can read off ancestors at a given depth in O(1).
// ---------------------------------------------------------------------------

class phrase_parser {
public:
    explicit phrase_parser(alphabet a) : alpha_(a) {
        depths_.push_back(0);
        path_.push_back(0);
    }

    struct event {
        uint64_t parent_node = 0;  // deepest matched node
        uint64_t new_node = 0;     // id assigned to the new phrase
        symbol sym = 0;
        uint64_t start = 0;
        uint64_t depth = 0;  // phrase length
    };

    // Feeds one symbol; returns an event when it completes a phrase.
    std::optional<event> push(symbol s) {
        if (alpha_ == alphabet::bit && s > 1)
            throw alphabet_error("symbol outside bit alphabet");
        ++consumed_;
        uint64_t cur = path_.back();
        auto it = children_.find(child_key(cur, s));
        if (it != children_.end()) {
            path_.push_back(it->second);
            return std::nullopt;
        }
        uint64_t id = depths_.size();
        depths_.push_back(depths_[cur] + 1);
        children_.emplace(child_key(cur, s), id);
        event ev{cur, id, s, consumed_ - depths_[id] + 1, depths_[id]};
        completed_path_.swap(path_);
        path_.clear();
        path_.push_back(0);
        return ev;
    }

    // Signals end of input. Returns the matched node when the tail exactly
    // equals an existing phrase (truncated final phrase), nothing otherwise.
    std::optional<uint64_t> finish() const {
        uint64_t cur = path_.back();
        if (cur == 0) return std::nullopt;
        return cur;
    }

    uint64_t symbols_consumed() const { return consumed_; }
    uint64_t node_count() const { return depths_.size(); }
    uint64_t depth_of(uint64_t node) const { return depths_[node]; }

    // Root-to-current-node path of the descent in progress; path()[d] is the
    // node at depth d. After finish() this is the root path of a truncated
    // final phrase's matched node.
    std::span<const uint64_t> path() const { return path_; }

    // Proper-ancestor path (root..parent) of the most recently completed
    // phrase. Valid until the next phrase completes.
    std::span<const uint64_t> completed_path() const { return completed_path_; }

private:
    static uint64_t child_key(uint64_t node, symbol s) {
        return (node << 8) | s;
    }

    alphabet alpha_;
    std::vector<uint64_t> depths_;
    std::vector<uint64_t> path_;
    std::vector<uint64_t> completed_path_;
    std::unordered_map<uint64_t, uint64_t> children_;
    uint64_t consumed_ = 0;
};

// ---------------------------------------------------------------------------
// Whole-input parse / encode / decode
// ---------------------------------------------------------------------------

inline std::vector<phrase> lz78_parse(const symbols& x, alphabet a) {
    if (x.empty()) throw param_error("empty input");
    phrase_parser parser(a);
    std::vector<phrase> out;
    for (symbol s : x) {
        if (auto ev = parser.push(s))
            out.push_back({ev->parent_node, ev->sym, true, ev->start, ev->depth});
    }
    if (auto tail = parser.finish()) {
        uint64_t len = parser.depth_of(*tail);
        out.push_back({*tail, 0, false, x.size() - len + 1, len});
    }
    return out;
}

inline std::vector<lz78_codeword> lz78_encode(const symbols& x, alphabet a) {
    std::vector<lz78_codeword> out;
    for (const phrase& p : lz78_parse(x, a))
        out.push_back({p.parent, p.sym, p.has_symbol});
    return out;
}

// Reconstructs the input from codewords. `n` is the original length; the
// expansion is truncated to it, which also resolves a truncated final phrase.
inline symbols lz78_decode(const std::vector<lz78_codeword>& codewords, uint64_t n) {
    symbols out;
    out.reserve(n);
    std::vector<uint64_t> lengths(codewords.size() + 1, 0);
    symbols chain;
    for (size_t j = 1; j <= codewords.size(); ++j) {
        const lz78_codeword& cw = codewords[j - 1];
        if (cw.parent >= j)
            throw malformed_stream_error("codeword " + std::to_string(j) +
                                         " references a later phrase");
        if (!cw.has_symbol && j != codewords.size())
            throw malformed_stream_error("truncated phrase before end of stream");
        lengths[j] = lengths[cw.parent] + (cw.has_symbol ? 1 : 0);
        chain.clear();
        if (cw.has_symbol) chain.push_back(cw.sym);
        for (uint64_t i = cw.parent; i != 0;) {
            const lz78_codeword& a = codewords[i - 1];
            chain.push_back(a.sym);
            i = a.parent;
        }
        out.insert(out.end(), chain.rbegin(), chain.rend());
    }
    if (out.size() < n)
        throw truncation_error("stream expands to " + std::to_string(out.size()) +
                               " symbols, expected " + std::to_string(n));
    out.resize(n);
    return out;
}

}  // namespace ralz
