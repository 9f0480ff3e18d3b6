#include "catch_amalgamated.hpp"

#include <sstream>

#include <ralz/format.hpp>
#include <ralz/harness.hpp>

using namespace ralz;

namespace {

stream_header rand_header(uint64_t n_max, alphabet a) {
    stream_header h;
    h.scheme = scheme_kind::randomized;
    h.alpha = a;
    h.n_max = n_max;
    h.block_levels = spanner_config::for_capacity(n_max).block_levels;
    h.anchor_words = 8;
    h.p_num = 1;
    h.p_den = 4;
    h.seed = 7;
    return h;
}

}  // namespace

TEST_CASE("word width") {
    CHECK(word_width(4, 1) == 7);
    CHECK(word_width(1, 1) == 6);
    CHECK(word_width(255, 8) == 20);
    CHECK_THROWS_AS(word_width(0, 1), param_error);
    CHECK_THROWS_AS(word_width(4, 3), param_error);
}

TEST_CASE("delimiters sit at the top of the word range") {
    stream_header h = rand_header(4, alphabet::bit);
    CHECK(h.word_bits() == 7);
    CHECK(h.delim_special() == 127);
    CHECK(h.delim_position() == 126);
}

TEST_CASE("simple codeword packing") {
    stream_header h = rand_header(100, alphabet::bit);
    word_writer w(h);
    CHECK(w.write(simple_codeword{0, 1}) == 0);  // (0 << 1) | 1
    word_stream s = w.finalize(1);
    CHECK(s.words[0] == 1);
}

TEST_CASE("position codeword layout") {
    stream_header h = rand_header(100, alphabet::bit);
    word_writer w(h);
    w.write(position_codeword{5});
    word_stream s = w.finalize(10);
    CHECK(s.words[0] == h.delim_position());
    CHECK(s.words[1] == 5);
}

TEST_CASE("codeword roundtrip for every variant") {
    stream_header h = rand_header(5000, alphabet::byte);
    word_writer w(h);
    splitmix64 rng(3);
    std::vector<codeword> written;
    std::vector<uint64_t> offsets;
    for (int i = 0; i < 500; ++i) {
        uint64_t off = w.offset();
        uint64_t link = off ? rng.below(off + 1) : 0;
        codeword cw;
        switch (rng.below(3)) {
            case 0:
                cw = simple_codeword{link, symbol(rng.below(256))};
                break;
            case 1:
                cw = special_codeword{1 + rng.below(h.n_max), link,
                                      symbol(rng.below(256)),
                                      off ? rng.below(off + 1) : 0,
                                      off ? rng.below(off + 1) : 0};
                break;
            default:
                cw = position_codeword{1 + rng.below(h.n_max)};
                break;
        }
        offsets.push_back(w.write(cw));
        written.push_back(cw);
    }
    word_stream s = w.finalize(100);
    stream_view v = view_of(s);
    uint64_t off = 0;
    for (size_t i = 0; i < written.size(); ++i) {
        CHECK(off == offsets[i]);
        decoded_codeword dc = read_codeword_at(v, off);
        CHECK(dc.value == written[i]);
        off += dc.length;
    }
    CHECK(off == v.word_count);
}

TEST_CASE("deterministic codeword stride") {
    stream_header h;
    h.scheme = scheme_kind::deterministic;
    h.alpha = alphabet::bit;
    h.n_max = 64;
    h.block_levels = 6;
    word_writer w(h);
    w.write(det_codeword{1, 0, 0, 1});
    w.write(det_codeword{2, 1, 0, 0});
    word_stream s = w.finalize(3);
    stream_view v = view_of(s);
    auto first = std::get<det_codeword>(read_codeword_at(v, 0).value);
    CHECK(first.position == 1);
    CHECK(first.parent_index == 0);
    CHECK(first.sym == 1);
    auto second = std::get<det_codeword>(read_codeword_at(v, 3).value);
    CHECK(second.parent_index == 1);
    CHECK_THROWS_AS(read_codeword_at(v, 1), malformed_stream_error);
}

TEST_CASE("data words never collide with delimiters") {
    stream_header h = rand_header(4, alphabet::bit);
    word_writer w(h);
    CHECK_THROWS_AS(w.write(special_codeword{h.delim_position(), 0, 0, 0, 0}),
                    capacity_error);
}

TEST_CASE("capacity limit") {
    stream_header h = rand_header(1, alphabet::bit);
    word_writer w(h);
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 100; ++i) w.write(simple_codeword{0, 0});
        }(),
        capacity_error);
}

TEST_CASE("header roundtrip is byte-identical") {
    stream_header h = rand_header(977, alphabet::byte);
    std::string bytes = encode_header(h);
    CHECK(bytes.size() == header_bytes);
    stream_header back = decode_header(
        reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
    CHECK(encode_header(back) == bytes);
    CHECK(back.scheme == h.scheme);
    CHECK(back.n_max == h.n_max);
    CHECK(back.anchor_words == h.anchor_words);
    CHECK(back.p_num == h.p_num);
    CHECK(back.p_den == h.p_den);
    CHECK(back.seed == h.seed);
}

TEST_CASE("save and load reproduce the word sequence exactly") {
    stream_header h = rand_header(5000, alphabet::bit);
    word_writer w(h);
    splitmix64 rng(11);
    for (int i = 0; i < 200; ++i)
        w.write(simple_codeword{w.offset() ? rng.below(w.offset()) : 0,
                                symbol(rng.below(2))});
    word_stream s = w.finalize(4321);
    std::stringstream buf;
    save_stream(s, buf);
    word_stream back = load_stream(buf);
    CHECK(back.words == s.words);
    CHECK(back.length == s.length);
    std::stringstream again;
    save_stream(back, again);
    CHECK(again.str() == buf.str());
}

TEST_CASE("footer validation") {
    stream_header h = rand_header(100, alphabet::bit);
    word_writer w(h);
    w.write(simple_codeword{0, 1});
    word_stream s = w.finalize(1);

    std::stringstream buf;
    save_stream(s, buf);
    std::string bytes = buf.str();

    // Truncating the byte stream destroys the footer.
    std::stringstream cut(bytes.substr(0, header_bytes));
    CHECK_THROWS_AS(load_stream(cut), malformed_stream_error);

    // Corrupting the magic is rejected outright.
    std::string bad = bytes;
    bad[0] = 'X';
    std::stringstream badm(bad);
    CHECK_THROWS_AS(load_stream(badm), malformed_stream_error);
}

TEST_CASE("reads past the end raise truncation errors") {
    stream_header h = rand_header(100, alphabet::bit);
    word_writer w(h);
    w.write(position_codeword{3});
    word_stream s = w.finalize(5);
    stream_view v = view_of(s);
    CHECK_THROWS_AS(read_codeword_at(v, 2), truncation_error);
    stream_view cut = prefix_view(s, 1, 0);
    CHECK_THROWS_AS(read_codeword_at(cut, 0), truncation_error);
}

TEST_CASE("anchor window scanning") {
    stream_header h = rand_header(100, alphabet::bit);  // B = 8
    word_writer w(h);
    w.write(position_codeword{1});            // offset 0, block 0
    for (int i = 0; i < 6; ++i) w.write(simple_codeword{0, 0});
    w.write(position_codeword{40});           // offset 8 = 1*B
    word_stream s = w.finalize(50);
    stream_view v = view_of(s);
    CHECK(find_position_codeword(v, 0) == 0);
    CHECK(find_position_codeword(v, 1) == 8);
    CHECK_FALSE(find_position_codeword(v, 7).has_value());

    stream_header det;
    det.scheme = scheme_kind::deterministic;
    det.alpha = alphabet::bit;
    det.n_max = 100;
    det.block_levels = 7;
    word_writer dw(det);
    dw.write(det_codeword{1, 0, 0, 0});
    word_stream ds = dw.finalize(1);
    stream_view dv = view_of(ds);
    CHECK_THROWS_AS(find_position_codeword(dv, 0), param_error);
}

TEST_CASE("delimiter exclusivity on generated streams") {
    // Every delimiter word in a compressed stream begins a special or
    // position codeword; sequential parsing must classify each word exactly
    // once.
    scheme_params prm = scheme_params::from_alpha(1, 2, 3000, alphabet::bit, 5);
    symbols x = gen_random(3000, 9, alphabet::bit);
    word_stream s = rand_compress(x, prm);
    stream_view v = view_of(s);
    std::vector<bool> is_boundary(v.word_count, false);
    std::vector<bool> in_codeword(v.word_count, false);
    uint64_t off = 0;
    while (off < v.word_count) {
        decoded_codeword dc = read_codeword_at(v, off);
        is_boundary[off] = true;
        for (uint64_t i = 0; i < dc.length; ++i) in_codeword[off + i] = true;
        off += dc.length;
    }
    REQUIRE(off == v.word_count);
    for (uint64_t i = 0; i < v.word_count; ++i) {
        REQUIRE(in_codeword[i]);
        uint64_t word = v.word(i);
        if (word == s.header.delim_special()) {
            CHECK(is_boundary[i]);
            CHECK(std::holds_alternative<special_codeword>(
                read_codeword_at(v, i).value));
        }
        if (word == s.header.delim_position()) {
            CHECK(is_boundary[i]);
            CHECK(std::holds_alternative<position_codeword>(
                read_codeword_at(v, i).value));
        }
    }
}

TEST_CASE("straddling codewords keep anchors within the window") {
    // All-special codewords (5 words) with B = 8 force straddles; the anchor
    // must still begin at most 7 words after each block boundary.
    scheme_params prm = scheme_params::from_alpha(1, 1, 2000, alphabet::bit, 3);
    prm.anchor_words = 8;
    symbols x = gen_random(2000, 4, alphabet::bit);
    word_stream s = rand_compress(x, prm);
    stream_view v = view_of(s);
    uint64_t blocks = v.word_count / s.header.anchor_words;
    uint64_t found = 0;
    for (uint64_t k = 0; k + 1 < blocks; ++k) {
        auto off = find_position_codeword(v, k);
        REQUIRE(off.has_value());
        CHECK(*off >= k * s.header.anchor_words);
        CHECK(*off <= k * s.header.anchor_words + 7);
        ++found;
    }
    CHECK(found > 10);
}

TEST_CASE("word buffer publishes committed prefixes") {
    word_buffer buf(100);
    buf.append(42);
    CHECK(buf.committed() == 0);
    buf.commit();
    CHECK(buf.committed() == 1);
    CHECK(buf.read(0) == 42);
    CHECK(buf.snapshot(1) == std::vector<uint64_t>{42});
}
