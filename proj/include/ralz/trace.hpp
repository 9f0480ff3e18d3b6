#pragma once

#include <cstdint>

namespace ralz {

// Instrumentation for one access/extract call. Every hop lands on a codeword
// that has to be read, so `codewords_read` doubles as the total node-visit
// count; `search_reads` is the slice of it spent in the binary search.
struct access_trace {
    uint64_t codewords_read = 0;
    uint64_t parent_hops = 0;
    uint64_t spanner_hops = 0;
    uint64_t search_reads = 0;

    uint64_t node_visits() const { return codewords_read; }

    void reset() { *this = access_trace{}; }
};

}  // namespace ralz
