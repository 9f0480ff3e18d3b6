#pragma once

#include <array>
#include <atomic>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <variant>

#include "common.hpp"

namespace ralz {

// ---------------------------------------------------------------------------
// On-disk layout
//
//   magic "RALZ" | version u32 | scheme u8 | n_max u64 | symbol_bits u8 |
//   L u32 | B u32 | p_num u64 | p_den u64 | seed u64
//
// followed by the word section: fixed-width words of w bits each, packed
// MSB-first into bytes and zero-padded to a byte boundary. Integers in the
// header are little-endian. The last two words are the footer
// [position delimiter, n]. All link fields hold word offsets shifted by one
// (0 means the trie root); the deterministic scheme stores phrase ordinals
// shifted by one instead, since its codewords have a fixed 3-word stride.
//
//   w = ceil(log2(n_max + 2)) + symbol_bits + 3
//
// The top two word values are reserved as delimiters and never appear as
// data: all-ones marks a special codeword, all-ones-minus-one a position
// codeword.
// ---------------------------------------------------------------------------

enum class scheme_kind : uint8_t { lz78 = 0, deterministic = 1, randomized = 2 };

inline const char* scheme_name(scheme_kind s) {
    switch (s) {
        case scheme_kind::lz78: return "lz78";
        case scheme_kind::deterministic: return "det";
        case scheme_kind::randomized: return "rand";
    }
    return "?";
}

inline uint32_t word_width(uint64_t n_max, uint32_t sym_bits) {
    if (n_max < 1) throw param_error("n_max must be at least 1");
    if (sym_bits != 1 && sym_bits != 8)
        throw param_error("symbol width must be 1 or 8 bits");
    uint32_t w = ceil_log2(n_max + 2) + sym_bits + 3;
    if (w > 62) throw param_error("n_max too large for the word format");
    return w;
}

struct stream_header {
    scheme_kind scheme = scheme_kind::lz78;
    alphabet alpha = alphabet::byte;
    uint64_t n_max = 1;
    uint32_t block_levels = 1;  // L, spanner block length in levels
    uint32_t anchor_words = 0;  // B, position-anchor spacing (randomized only)
    uint64_t p_num = 0;         // special-codeword probability p_num/p_den
    uint64_t p_den = 1;
    uint64_t seed = 0;

    uint32_t sym_bits() const { return symbol_bits(alpha); }
    uint32_t word_bits() const { return word_width(n_max, sym_bits()); }
    uint64_t delim_special() const { return (uint64_t(1) << word_bits()) - 1; }
    uint64_t delim_position() const { return (uint64_t(1) << word_bits()) - 2; }
    uint64_t sym_mask() const { return (uint64_t(1) << sym_bits()) - 1; }

    uint64_t pack_link(uint64_t link, symbol s) const {
        return (link << sym_bits()) | (uint64_t(s) & sym_mask());
    }

    // Largest representable word count: it must stay below the delimiters,
    // and packed offset links must as well.
    uint64_t max_words() const {
        uint64_t cap = delim_position() - 1;
        if (scheme != scheme_kind::deterministic) {
            uint64_t link_cap = (delim_position() >> sym_bits()) - 1;
            cap = cap < link_cap ? cap : link_cap;
        }
        return cap;
    }
};

inline constexpr std::array<char, 4> stream_magic = {'R', 'A', 'L', 'Z'};
inline constexpr uint32_t stream_version = 1;
inline constexpr size_t header_bytes = 4 + 4 + 1 + 8 + 1 + 4 + 4 + 8 + 8 + 8;

// ---------------------------------------------------------------------------
// Codewords
// ---------------------------------------------------------------------------

struct simple_codeword {
    uint64_t parent_link = 0;  // word offset + 1, 0 = root
    symbol sym = 0;
    friend bool operator==(const simple_codeword&, const simple_codeword&) = default;
};

struct special_codeword {
    uint64_t depth = 0;
    uint64_t parent_link = 0;
    symbol sym = 0;
    uint64_t special_parent_link = 0;    // nearest special ancestor
    uint64_t special_ancestor_link = 0;  // long-jump ancestor
    friend bool operator==(const special_codeword&, const special_codeword&) = default;
};

struct position_codeword {
    uint64_t position = 0;  // 1-based start of the next phrase
    friend bool operator==(const position_codeword&, const position_codeword&) = default;
};

struct det_codeword {
    uint64_t position = 0;
    uint64_t parent_index = 0;
    uint64_t ancestor_index = 0;
    symbol sym = 0;
    friend bool operator==(const det_codeword&, const det_codeword&) = default;
};

using codeword =
    std::variant<simple_codeword, special_codeword, position_codeword, det_codeword>;

inline uint32_t codeword_words(const codeword& cw) {
    switch (cw.index()) {
        case 0: return 1;
        case 1: return 5;
        case 2: return 2;
        default: return 3;
    }
}

// ---------------------------------------------------------------------------
// Append-only word storage with stable addresses. A single writer appends
// and publishes whole codewords via commit(); readers may concurrently use
// any offset below a committed count they have observed.
// ---------------------------------------------------------------------------

class word_buffer {
public:
    explicit word_buffer(uint64_t max_words) {
        chunks_.resize(ceil_div(max_words == 0 ? 1 : max_words, chunk_words));
    }

    void append(uint64_t w) {
        uint64_t c = size_ / chunk_words;
        if (c >= chunks_.size()) throw capacity_error("word buffer full");
        if (!chunks_[c]) chunks_[c] = std::make_unique<chunk>();
        (*chunks_[c])[size_ % chunk_words] = w;
        ++size_;
    }

    void commit() { committed_.store(size_, std::memory_order_release); }
    uint64_t committed() const { return committed_.load(std::memory_order_acquire); }
    uint64_t size() const { return size_; }

    uint64_t read(uint64_t off) const {
        return (*chunks_[off / chunk_words])[off % chunk_words];
    }

    std::vector<uint64_t> snapshot(uint64_t count) const {
        std::vector<uint64_t> out;
        out.reserve(count);
        for (uint64_t i = 0; i < count; ++i) out.push_back(read(i));
        return out;
    }

private:
    static constexpr uint64_t chunk_words = 4096;
    using chunk = std::array<uint64_t, chunk_words>;
    std::vector<std::unique_ptr<chunk>> chunks_;
    std::atomic<uint64_t> committed_{0};
    uint64_t size_ = 0;
};

// A finalized stream. `words` includes the two footer words.
struct word_stream {
    stream_header header;
    std::vector<uint64_t> words;
    uint64_t length = 0;  // n, from the footer

    uint64_t payload_words() const { return words.size() - 2; }
};

// Read-only view of the codeword region (footer excluded). Works over a
// finalized stream, a truncated whole-codeword prefix, or a live buffer
// still being appended to.
struct stream_view {
    const stream_header* header = nullptr;
    uint64_t word_count = 0;  // codeword words only
    uint64_t length = 0;      // symbols covered
    const uint64_t* contig = nullptr;
    const word_buffer* live = nullptr;

    uint64_t word(uint64_t off) const {
        return contig ? contig[off] : live->read(off);
    }
};

inline stream_view view_of(const word_stream& s) {
    return {&s.header, s.words.size() - 2, s.length, s.words.data(), nullptr};
}

// Whole-codeword prefix of a finalized stream; `covered` is the number of
// input symbols the prefix encodes.
inline stream_view prefix_view(const word_stream& s, uint64_t word_count,
                               uint64_t covered) {
    if (word_count > s.words.size())
        throw bounds_error("prefix beyond stream end");
    return {&s.header, word_count, covered, s.words.data(), nullptr};
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

class word_writer {
public:
    explicit word_writer(const stream_header& h)
        : header_(h), buf_(h.max_words()) {}

    uint64_t offset() const { return buf_.size(); }
    const word_buffer& buffer() const { return buf_; }
    void commit() { buf_.commit(); }

    uint64_t write(const codeword& cw) {
        uint64_t begin = buf_.size();
        // +2 keeps room for the footer.
        if (begin + codeword_words(cw) + 2 > header_.max_words())
            throw capacity_error("stream exceeds addressable word count");
        std::visit([&](const auto& c) { put(c); }, cw);
        return begin;
    }

    // Appends the footer and freezes the stream.
    word_stream finalize(uint64_t n) {
        if (n < 1 || n > header_.n_max)
            throw param_error("final length outside [1, n_max]");
        raw(header_.delim_position());
        raw(n);
        buf_.commit();
        word_stream out;
        out.header = header_;
        out.words = buf_.snapshot(buf_.size());
        out.length = n;
        return out;
    }

private:
    void data(uint64_t w) {
        if (w >= header_.delim_position())
            throw capacity_error("data word collides with a delimiter");
        buf_.append(w);
    }
    void raw(uint64_t w) { buf_.append(w); }

    void put(const simple_codeword& c) { data(header_.pack_link(c.parent_link, c.sym)); }
    void put(const special_codeword& c) {
        raw(header_.delim_special());
        data(c.depth);
        data(header_.pack_link(c.parent_link, c.sym));
        data(c.special_parent_link);
        data(c.special_ancestor_link);
    }
    void put(const position_codeword& c) {
        raw(header_.delim_position());
        data(c.position);
    }
    void put(const det_codeword& c) {
        data(c.position);
        data(header_.pack_link(c.parent_index + 1, c.sym));
        data(c.ancestor_index + 1);
    }

    stream_header header_;
    word_buffer buf_;
};

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

struct decoded_codeword {
    codeword value;
    uint32_t length = 0;  // words
};

namespace detail {

inline uint64_t checked_word(const stream_view& v, uint64_t off) {
    if (off >= v.word_count) throw truncation_error("read past end of stream");
    return v.word(off);
}

inline uint64_t check_link(uint64_t link, uint64_t at) {
    if (link > at) throw malformed_stream_error("link references a later offset");
    return link;
}

}  // namespace detail

// Decodes the codeword starting at a word offset. The leading word selects
// the layout: special and position codewords are marked by their delimiters,
// anything else is a simple or deterministic codeword depending on the
// stream's scheme.
inline decoded_codeword read_codeword_at(const stream_view& v, uint64_t offset) {
    const stream_header& h = *v.header;
    uint64_t w0 = detail::checked_word(v, offset);
    if (w0 == h.delim_special()) {
        if (h.scheme != scheme_kind::randomized)
            throw malformed_stream_error("special codeword in a non-randomized stream");
        special_codeword c;
        c.depth = detail::checked_word(v, offset + 1);
        if (c.depth < 1 || c.depth > h.n_max)
            throw malformed_stream_error("special depth out of range");
        uint64_t packed = detail::checked_word(v, offset + 2);
        c.parent_link = detail::check_link(packed >> h.sym_bits(), offset);
        c.sym = symbol(packed & h.sym_mask());
        c.special_parent_link =
            detail::check_link(detail::checked_word(v, offset + 3), offset);
        c.special_ancestor_link =
            detail::check_link(detail::checked_word(v, offset + 4), offset);
        return {c, 5};
    }
    if (w0 == h.delim_position()) {
        if (h.scheme != scheme_kind::randomized)
            throw malformed_stream_error("position codeword in a non-randomized stream");
        position_codeword c;
        c.position = detail::checked_word(v, offset + 1);
        if (c.position < 1 || c.position > h.n_max + 1)
            throw malformed_stream_error("anchor position out of range");
        return {c, 2};
    }
    if (h.scheme == scheme_kind::deterministic) {
        if (offset % 3 != 0)
            throw malformed_stream_error("deterministic read off the codeword stride");
        det_codeword c;
        c.position = w0;
        if (c.position < 1 || c.position > h.n_max)
            throw malformed_stream_error("phrase position out of range");
        uint64_t packed = detail::checked_word(v, offset + 1);
        uint64_t parent = packed >> h.sym_bits();
        uint64_t ancestor = detail::checked_word(v, offset + 2);
        uint64_t index = offset / 3 + 1;
        if (parent < 1 || parent > index || ancestor < 1 || ancestor > index)
            throw malformed_stream_error("phrase ordinal out of range");
        c.parent_index = parent - 1;
        c.ancestor_index = ancestor - 1;
        c.sym = symbol(packed & h.sym_mask());
        return {c, 3};
    }
    simple_codeword c;
    c.parent_link = detail::check_link(w0 >> h.sym_bits(), offset);
    c.sym = symbol(w0 & h.sym_mask());
    return {c, 1};
}

// Finds the position codeword anchoring block `k`: the first position
// delimiter within the 8-word window starting at k*B. Returns its offset,
// or nothing when the window holds none (possible near the stream ends).
inline std::optional<uint64_t> find_position_codeword(const stream_view& v,
                                                      uint64_t block) {
    const stream_header& h = *v.header;
    if (h.anchor_words == 0)
        throw param_error("stream has no position anchors");
    uint64_t begin = block * h.anchor_words;
    for (uint64_t off = begin; off < begin + 8 && off + 1 < v.word_count; ++off)
        if (v.word(off) == h.delim_position()) return off;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
inline uint32_t get_u32(const unsigned char* p) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}
inline uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace detail

inline std::string encode_header(const stream_header& h) {
    std::string out;
    out.reserve(header_bytes);
    out.append(stream_magic.data(), 4);
    detail::put_u32(out, stream_version);
    out.push_back(char(h.scheme));
    detail::put_u64(out, h.n_max);
    out.push_back(char(h.sym_bits()));
    detail::put_u32(out, h.block_levels);
    detail::put_u32(out, h.anchor_words);
    detail::put_u64(out, h.p_num);
    detail::put_u64(out, h.p_den);
    detail::put_u64(out, h.seed);
    return out;
}

inline stream_header decode_header(const unsigned char* p, size_t len) {
    if (len < header_bytes) throw truncation_error("header truncated");
    if (std::memcmp(p, stream_magic.data(), 4) != 0)
        throw malformed_stream_error("bad magic");
    if (detail::get_u32(p + 4) != stream_version)
        throw malformed_stream_error("unsupported version");
    stream_header h;
    uint8_t scheme = p[8];
    if (scheme > 2) throw malformed_stream_error("unknown scheme");
    h.scheme = scheme_kind(scheme);
    h.n_max = detail::get_u64(p + 9);
    uint8_t sb = p[17];
    if (sb != 1 && sb != 8) throw malformed_stream_error("unsupported symbol width");
    h.alpha = sb == 1 ? alphabet::bit : alphabet::byte;
    h.block_levels = detail::get_u32(p + 18);
    h.anchor_words = detail::get_u32(p + 22);
    h.p_num = detail::get_u64(p + 26);
    h.p_den = detail::get_u64(p + 34);
    h.seed = detail::get_u64(p + 42);
    if (h.n_max < 1 || h.block_levels < 1)
        throw malformed_stream_error("bad header parameters");
    if (h.scheme == scheme_kind::randomized &&
        (h.anchor_words < 3 || h.p_den == 0 || h.p_num > h.p_den))
        throw malformed_stream_error("bad randomized-scheme parameters");
    word_width(h.n_max, sb);  // validates representability
    return h;
}

// MSB-first bit packer for the word section.
class bit_packer {
public:
    explicit bit_packer(uint32_t width) : width_(width) {}

    void push(uint64_t w, std::string& out) {
        acc_ = (acc_ << width_) | (w & ((width_ == 64 ? 0 : (uint64_t(1) << width_)) - 1));
        bits_ += width_;
        while (bits_ >= 8) {
            bits_ -= 8;
            out.push_back(char((acc_ >> bits_) & 0xff));
        }
    }

    void flush(std::string& out) {
        if (bits_ > 0) {
            out.push_back(char((acc_ << (8 - bits_)) & 0xff));
            bits_ = 0;
        }
        acc_ = 0;
    }

private:
    uint32_t width_;
    unsigned __int128 acc_ = 0;
    uint32_t bits_ = 0;
};

class bit_unpacker {
public:
    bit_unpacker(uint32_t width, const unsigned char* data, size_t len)
        : width_(width), data_(data), len_(len) {}

    uint64_t words_available() const { return (len_ * 8) / width_; }

    uint64_t get() {
        while (bits_ < width_) {
            acc_ = (acc_ << 8) | (pos_ < len_ ? data_[pos_] : 0);
            ++pos_;
            bits_ += 8;
        }
        bits_ -= width_;
        return uint64_t(acc_ >> bits_) &
               ((width_ == 64 ? 0 : (uint64_t(1) << width_)) - 1);
    }

private:
    uint32_t width_;
    const unsigned char* data_;
    size_t len_;
    size_t pos_ = 0;
    unsigned __int128 acc_ = 0;
    uint32_t bits_ = 0;
};

inline void save_stream(const word_stream& s, std::ostream& os) {
    std::string bytes = encode_header(s.header);
    bit_packer packer(s.header.word_bits());
    for (uint64_t w : s.words) packer.push(w, bytes);
    packer.flush(bytes);
    os.write(bytes.data(), std::streamsize(bytes.size()));
    if (!os) throw io_error("write failed");
}

inline word_stream load_stream(std::istream& is) {
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    word_stream s;
    s.header = decode_header(p, bytes.size());
    bit_unpacker unpacker(s.header.word_bits(), p + header_bytes,
                          bytes.size() - header_bytes);
    uint64_t count = unpacker.words_available();
    s.words.reserve(count);
    for (uint64_t i = 0; i < count; ++i) s.words.push_back(unpacker.get());
    // A word that lies entirely in the byte padding shows up as a trailing
    // zero; real streams end with the footer length, which is >= 1.
    if (!s.words.empty() && s.words.back() == 0) s.words.pop_back();
    if (s.words.size() < 2) throw truncation_error("stream too short for a footer");
    if (s.words[s.words.size() - 2] != s.header.delim_position())
        throw malformed_stream_error("missing footer delimiter");
    s.length = s.words.back();
    if (s.length < 1 || s.length > s.header.n_max)
        throw malformed_stream_error("footer length out of range");
    return s;
}

// Loads a stream that may lack its footer (a flushed but unfinalized online
// stream, or a file truncated mid-write). The trailing partial codeword, if
// any, is the caller's concern; all complete words are returned.
struct prefix_stream {
    stream_header header;
    std::vector<uint64_t> words;
};

inline prefix_stream load_prefix_stream(std::istream& is) {
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    prefix_stream s;
    s.header = decode_header(p, bytes.size());
    bit_unpacker unpacker(s.header.word_bits(), p + header_bytes,
                          bytes.size() - header_bytes);
    uint64_t count = unpacker.words_available();
    s.words.reserve(count);
    for (uint64_t i = 0; i < count; ++i) s.words.push_back(unpacker.get());
    return s;
}

inline prefix_stream load_prefix_stream_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open " + path);
    return load_prefix_stream(is);
}

inline void save_stream_file(const word_stream& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open " + path + " for writing");
    save_stream(s, os);
}

inline word_stream load_stream_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open " + path);
    return load_stream(is);
}

}  // namespace ralz
