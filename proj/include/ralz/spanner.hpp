#pragma once

#include "common.hpp"

namespace ralz {

// Shortcut-edge structure on a backward-directed line of levels 0..n-1.
// On top of the parent edges (i -> i-1), every level i >= 1 carries one long
// edge i -> max(i - 2^(i mod L) * L, 0). Walking first to a level whose
// residue is L-1 and then greedily taking long edges that do not overshoot
// reaches any lower level within 4L hops.

struct spanner_config {
    uint32_t block_levels = 1;  // L
    uint64_t n_cap = 1;

    static spanner_config for_capacity(uint64_t n_cap) {
        if (n_cap < 1) throw param_error("capacity must be at least 1");
        uint32_t L = ceil_log2(n_cap);
        return {L < 1 ? 1u : L, n_cap};
    }
};

inline constexpr uint32_t block_residue(uint64_t level, uint32_t block_levels) {
    return static_cast<uint32_t>(level % block_levels);
}

inline constexpr uint64_t jump_target(uint64_t level, uint32_t block_levels) {
    uint32_t r = block_residue(level, block_levels);
    if (r >= 63) return 0;
    uint64_t span = (uint64_t(1) << r) * block_levels;
    return span >= level ? 0 : level - span;
}

// Walks from level `from` down to level `to` (0 <= to <= from).
//   step:  advance the external cursor along one parent edge
//   jump:  advance it along the long edge
//   probe: report the level the long edge at the given level reaches
// Returns the number of hops taken.
template <class Step, class Jump, class Probe>
uint64_t navigate(uint64_t from, uint64_t to, uint32_t block_levels,
                  Step&& step, Jump&& jump, Probe&& probe) {
    if (to > from) throw bounds_error("navigate target above start level");
    uint64_t cur = from;
    uint64_t hops = 0;
    // Phase 1: parent edges until the residue is L-1.
    while (cur > to && block_residue(cur, block_levels) != block_levels - 1) {
        step();
        --cur;
        ++hops;
    }
    // Phase 2: long edge whenever it does not overshoot, parent edge otherwise.
    while (cur > to) {
        uint64_t jt = probe(cur);
        if (jt >= cur) throw spanner_error("long edge does not descend");
        if (jt >= to) {
            jump();
            cur = jt;
        } else {
            step();
            --cur;
        }
        ++hops;
    }
    return hops;
}

}  // namespace ralz
