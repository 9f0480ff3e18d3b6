#include <CLI11.hpp>

#include <iostream>

#include <ralz/ralz.hpp>

// Exit codes: 0 ok, 1 parameter/usage, 2 I/O, 3 malformed stream,
// 4 verification mismatch or out-of-range position, 5 capacity.
namespace {

using namespace ralz;

constexpr int exit_ok = 0;
constexpr int exit_param = 1;
constexpr int exit_io = 2;
constexpr int exit_malformed = 3;
constexpr int exit_mismatch = 4;
constexpr int exit_capacity = 5;

struct cli_config {
    std::string input;
    std::string output;
    std::string original;
    std::string scheme = "rand";
    std::string alphabet_name = "byte";
    double epsilon = 0;
    double alpha = -1;
    uint64_t seed = 1;
    uint64_t n_max = 0;
    uint64_t pos = 0;
    std::string range;
    bool trace = false;
    bool prefix = false;
    bool stream_mode = false;
    std::string report;
    std::string sweep;
    std::string kind = "random";
    uint64_t n = 1 << 20;
    uint64_t k = 8;
    uint64_t ell = 0;
    uint64_t t = 0;
    uint64_t period = 16;
    uint64_t samples = 1000;
    uint64_t estimate = 0;
    uint64_t seed_count = 3;
};

alphabet parse_alphabet(const std::string& name) {
    if (name == "bit") return alphabet::bit;
    if (name == "byte") return alphabet::byte;
    throw param_error("alphabet must be bit or byte");
}

symbols read_input(const std::string& path, alphabet a) {
    std::string data;
    if (path.empty() || path == "-") {
        data.assign(std::istreambuf_iterator<char>(std::cin),
                    std::istreambuf_iterator<char>());
    } else {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw io_error("cannot open " + path);
        data.assign(std::istreambuf_iterator<char>(is),
                    std::istreambuf_iterator<char>());
    }
    if (a == alphabet::byte) return symbols(data.begin(), data.end());
    while (!data.empty() && (data.back() == '\n' || data.back() == '\r'))
        data.pop_back();
    return bits_from_string(data);
}

void write_output(const std::string& path, const symbols& x, alphabet a) {
    std::string data = a == alphabet::byte
                           ? std::string(x.begin(), x.end())
                           : bits_to_string(x);
    if (path.empty() || path == "-") {
        std::cout.write(data.data(), std::streamsize(data.size()));
        std::cout.flush();
        if (!std::cout) throw io_error("write to stdout failed");
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open " + path + " for writing");
    os.write(data.data(), std::streamsize(data.size()));
    if (!os) throw io_error("write failed");
}

word_stream load_compressed(const std::string& path) {
    if (path.empty() || path == "-") return load_stream(std::cin);
    return load_stream_file(path);
}

scheme_params rand_params(const cli_config& cfg, uint64_t n_max, alphabet a) {
    if (cfg.alpha >= 0 && cfg.epsilon > 0)
        throw param_error("give exactly one of --epsilon and --alpha");
    scheme_params prm;
    if (cfg.alpha >= 0) {
        auto [num, den] = alpha_to_rational(cfg.alpha);
        prm = scheme_params::from_alpha(num, den, n_max, a, cfg.seed);
    } else {
        double eps = cfg.epsilon > 0 ? cfg.epsilon : 0.5;
        prm = scheme_params::from_epsilon(eps, n_max, a, cfg.seed);
    }
    if (auto warn = prm.validate_warning())
        std::cerr << "warning: " << *warn << "\n";
    return prm;
}

int cmd_compress(const cli_config& cfg) {
    alphabet a = parse_alphabet(cfg.alphabet_name);
    if (cfg.stream_mode) {
        // Online mode: requires the capacity up front, consumes stdin or the
        // input file incrementally, flushes whole codewords.
        if (cfg.n_max == 0)
            throw param_error("--n-max is required in --stream mode");
        if (cfg.scheme != "rand")
            throw param_error("--stream mode is for the rand scheme");
        scheme_params prm = rand_params(cfg, cfg.n_max, a);
        online_compressor comp(prm);
        std::istream* in = &std::cin;
        std::ifstream file;
        if (!cfg.input.empty() && cfg.input != "-") {
            file.open(cfg.input, std::ios::binary);
            if (!file) throw io_error("cannot open " + cfg.input);
            in = &file;
        }
        std::ofstream out_file;
        std::ostream* out = &std::cout;
        if (!cfg.output.empty() && cfg.output != "-") {
            out_file.open(cfg.output, std::ios::binary);
            if (!out_file) throw io_error("cannot open " + cfg.output);
            out = &out_file;
        }
        std::string header = encode_header(comp.header());
        out->write(header.data(), std::streamsize(header.size()));
        bit_packer packer(comp.header().word_bits());
        uint64_t flushed_words = 0;
        std::string pending;
        char buf[65536];
        auto flush_committed = [&] {
            stream_view live = comp.committed_view();
            for (; flushed_words < live.word_count; ++flushed_words)
                packer.push(live.word(flushed_words), pending);
            out->write(pending.data(), std::streamsize(pending.size()));
            pending.clear();
        };
        while (in->read(buf, sizeof buf), in->gcount() > 0) {
            std::streamsize got = in->gcount();
            if (a == alphabet::byte) {
                for (std::streamsize i = 0; i < got; ++i)
                    comp.push(symbol(static_cast<unsigned char>(buf[i])));
            } else {
                for (std::streamsize i = 0; i < got; ++i) {
                    char c = buf[i];
                    if (c == '\n' || c == '\r') continue;
                    if (c != '0' && c != '1')
                        throw alphabet_error("input is not a bit string");
                    comp.push(symbol(c - '0'));
                }
            }
            flush_committed();
        }
        word_stream ws = comp.finalize();
        for (; flushed_words < ws.words.size(); ++flushed_words)
            packer.push(ws.words[flushed_words], pending);
        packer.flush(pending);
        out->write(pending.data(), std::streamsize(pending.size()));
        out->flush();
        if (!*out) throw io_error("write failed");
        return exit_ok;
    }

    symbols x = read_input(cfg.input, a);
    if (x.empty()) throw param_error("input is empty");
    uint64_t n_max = cfg.n_max ? cfg.n_max : x.size();
    word_stream ws;
    if (cfg.scheme == "lz78") {
        ws = baseline_compress(x, n_max, a);
    } else if (cfg.scheme == "det") {
        ws = det_compress(x, n_max, a);
    } else if (cfg.scheme == "rand") {
        ws = rand_compress(x, rand_params(cfg, n_max, a));
    } else {
        throw param_error("scheme must be lz78, det or rand");
    }
    if (cfg.output.empty() || cfg.output == "-") {
        save_stream(ws, std::cout);
        std::cout.flush();
    } else {
        save_stream_file(ws, cfg.output);
    }
    return exit_ok;
}

int cmd_decompress(const cli_config& cfg) {
    word_stream ws = load_compressed(cfg.input);
    stream_view v = view_of(ws);
    symbols x;
    switch (ws.header.scheme) {
        case scheme_kind::lz78: x = baseline_decompress(v); break;
        case scheme_kind::deterministic: x = det_decompress(v); break;
        case scheme_kind::randomized: x = rand_decompress(v); break;
    }
    write_output(cfg.output, x, ws.header.alpha);
    return exit_ok;
}

void print_trace(const access_trace& t) {
    std::cerr << "codewords_read=" << t.codewords_read
              << " parent_hops=" << t.parent_hops
              << " spanner_hops=" << t.spanner_hops
              << " search_reads=" << t.search_reads << "\n";
}

int cmd_access(const cli_config& cfg) {
    word_stream ws = load_compressed(cfg.input);
    if (ws.header.scheme == scheme_kind::lz78)
        throw param_error("lz78 streams have no random access support");
    stream_view v = view_of(ws);
    if (cfg.pos < 1 || cfg.pos > v.length)
        throw bounds_error("--pos out of [1, " + std::to_string(v.length) + "]");
    access_trace trace;
    symbol s = ws.header.scheme == scheme_kind::deterministic
                   ? det_access(v, cfg.pos, &trace)
                   : rand_access(v, cfg.pos, &trace);
    if (ws.header.alpha == alphabet::byte)
        std::cout << char(s) << "\n";
    else
        std::cout << int(s) << "\n";
    if (cfg.trace) print_trace(trace);
    return exit_ok;
}

std::pair<uint64_t, uint64_t> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw param_error("--range must be lo:hi");
    return {std::stoull(text.substr(0, colon)),
            std::stoull(text.substr(colon + 1))};
}

int cmd_extract(const cli_config& cfg) {
    word_stream ws = load_compressed(cfg.input);
    if (ws.header.scheme == scheme_kind::lz78)
        throw param_error("lz78 streams have no random access support");
    stream_view v = view_of(ws);
    auto [lo, hi] = parse_range(cfg.range);
    if (lo < 1 || hi > v.length || lo > hi)
        throw bounds_error("--range out of bounds");
    access_trace trace;
    symbols part = ws.header.scheme == scheme_kind::deterministic
                       ? det_extract(v, lo, hi, &trace)
                       : rand_extract(v, lo, hi, &trace);
    write_output(cfg.output, part, ws.header.alpha);
    if (ws.header.alpha == alphabet::byte && (cfg.output.empty() || cfg.output == "-"))
        std::cout << "\n";
    if (cfg.trace) print_trace(trace);
    return exit_ok;
}

int cmd_verify(const cli_config& cfg) {
    if (cfg.prefix) {
        // Online-contract check: the stream may be cut anywhere at or after
        // a flush. Complete codewords must decode to a prefix of the source.
        prefix_stream ps = cfg.input.empty() || cfg.input == "-"
                               ? load_prefix_stream(std::cin)
                               : load_prefix_stream_file(cfg.input);
        if (ps.header.scheme != scheme_kind::randomized)
            throw param_error("--prefix verification is for rand streams");
        symbols decoded = rand_decompress_prefix(ps.header, ps.words);
        symbols original = read_input(cfg.original, ps.header.alpha);
        bool ok;
        if (decoded.size() <= original.size()) {
            ok = std::equal(decoded.begin(), decoded.end(), original.begin());
        } else {
            // A finalized stream whose tail matched an existing phrase
            // expands one symbol past the footer length.
            ok = decoded.size() == original.size() + 1 &&
                 std::equal(original.begin(), original.end(), decoded.begin());
        }
        if (!ok) {
            std::cerr << "verify: prefix mismatch\n";
            return exit_mismatch;
        }
        std::cout << "ok (prefix of " << decoded.size() << " symbols)\n";
        return exit_ok;
    }
    word_stream ws = load_compressed(cfg.input);
    stream_view v = view_of(ws);
    symbols original = read_input(cfg.original, ws.header.alpha);

    symbols decoded;
    switch (ws.header.scheme) {
        case scheme_kind::lz78: decoded = baseline_decompress(v); break;
        case scheme_kind::deterministic: decoded = det_decompress(v); break;
        case scheme_kind::randomized: decoded = rand_decompress(v); break;
    }
    if (decoded != original) {
        std::cerr << "verify: roundtrip mismatch\n";
        return exit_mismatch;
    }
    if (ws.header.scheme == scheme_kind::randomized) {
        audit_report rep = audit_stream(v);
        uint64_t words = rep.simple + 5 * rep.special + 2 * rep.anchor;
        if (words + 2 != ws.words.size()) {
            std::cerr << "verify: word accounting mismatch\n";
            return exit_mismatch;
        }
    }
    if (ws.header.scheme != scheme_kind::lz78) {
        splitmix64 rng(17);
        uint64_t samples = std::min<uint64_t>(v.length, 512);
        for (uint64_t i = 0; i < samples; ++i) {
            uint64_t pos = 1 + rng.below(v.length);
            symbol s = ws.header.scheme == scheme_kind::deterministic
                           ? det_access(v, pos)
                           : rand_access(v, pos);
            if (s != original[pos - 1]) {
                std::cerr << "verify: access mismatch at " << pos << "\n";
                return exit_mismatch;
            }
        }
    }
    std::cout << "ok\n";
    return exit_ok;
}

int cmd_gen(const cli_config& cfg) {
    symbols x;
    alphabet a = alphabet::bit;
    if (cfg.kind == "random") {
        a = parse_alphabet(cfg.alphabet_name);
        x = gen_random(cfg.n, cfg.seed, a);
    } else if (cfg.kind == "repetitive") {
        a = parse_alphabet(cfg.alphabet_name);
        x = gen_repetitive(cfg.n, cfg.period, cfg.seed, a);
    } else if (cfg.kind == "lb") {
        x = gen_lb_s(cfg.k);
    } else if (cfg.kind == "lb-ell") {
        x = gen_lb_s_ell(cfg.k, cfg.ell);
    } else if (cfg.kind == "lb-ext") {
        x = gen_lb_extended(cfg.k, cfg.t ? cfg.t : 4, cfg.ell);
    } else if (cfg.kind == "ramp") {
        x = gen_ramp(cfg.n);
    } else if (cfg.kind == "log") {
        a = alphabet::byte;
        x = gen_loglike(cfg.n, cfg.seed);
    } else if (cfg.kind == "dna") {
        a = alphabet::byte;
        x = gen_dnalike(cfg.n, cfg.seed);
    } else if (cfg.kind == "vocab") {
        a = alphabet::byte;
        x = gen_vocablike(cfg.n, cfg.seed);
    } else {
        throw param_error("unknown corpus kind " + cfg.kind);
    }
    write_output(cfg.output, x, a);
    return exit_ok;
}

int cmd_bench(const cli_config& cfg) {
    alphabet a = parse_alphabet(cfg.alphabet_name);
    symbols x;
    std::string corpus;
    if (!cfg.input.empty()) {
        x = read_input(cfg.input, a);
        corpus = cfg.input;
    } else {
        x = gen_random(cfg.n, cfg.seed, a);
        corpus = "random-" + std::to_string(cfg.n);
    }
    std::vector<double> alphas = {0.0, 1.0 / 16, 1.0 / 8, 1.0 / 4};
    if (!cfg.sweep.empty()) {
        alphas.clear();
        std::stringstream ss(cfg.sweep);
        std::string cell;
        while (std::getline(ss, cell, ',')) alphas.push_back(std::stod(cell));
    }
    std::vector<uint64_t> seeds;
    for (uint64_t i = 0; i < std::max<uint64_t>(1, cfg.seed_count); ++i)
        seeds.push_back(cfg.seed + i);
    auto rows = measure_competitive(corpus, x, a, alphas, seeds, cfg.samples);
    if (cfg.report.empty() || cfg.report == "-") {
        emit_csv(rows, std::cout);
    } else {
        std::ofstream os(cfg.report);
        if (!os) throw io_error("cannot open " + cfg.report);
        emit_csv(rows, os);
    }
    return exit_ok;
}

int cmd_suggest_nmax(const cli_config& cfg) {
    if (cfg.estimate == 0) throw param_error("--estimate is required");
    uint64_t padded = cfg.estimate + cfg.estimate / 4 + 1;
    uint64_t nmax = 1;
    while (nmax < padded) nmax <<= 1;
    std::cout << nmax << "\n";
    return exit_ok;
}

int dispatch(const std::string& cmd, const cli_config& cfg) {
    if (cmd == "compress") return cmd_compress(cfg);
    if (cmd == "decompress") return cmd_decompress(cfg);
    if (cmd == "access") return cmd_access(cfg);
    if (cmd == "extract") return cmd_extract(cfg);
    if (cmd == "verify") return cmd_verify(cfg);
    if (cmd == "gen") return cmd_gen(cfg);
    if (cmd == "bench") return cmd_bench(cfg);
    if (cmd == "suggest-nmax") return cmd_suggest_nmax(cfg);
    throw param_error("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LZ78 compression with random access"};
    app.require_subcommand(1);
    cli_config cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-i,--input", cfg.input, "input path (- for stdin)");
        sub->add_option("-o,--output", cfg.output, "output path (- for stdout)");
        return sub;
    };

    auto* compress = add_common(app.add_subcommand("compress", "compress a file"));
    compress->add_option("--scheme", cfg.scheme, "lz78 | det | rand");
    compress->add_option("--alphabet", cfg.alphabet_name, "bit | byte");
    compress->add_option("--epsilon", cfg.epsilon, "competitive overhead bound");
    compress->add_option("--alpha", cfg.alpha, "direct special fraction");
    compress->add_option("--seed", cfg.seed, "PRNG seed");
    compress->add_option("--n-max", cfg.n_max, "capacity bound in symbols");
    compress->add_flag("--stream", cfg.stream_mode, "online mode, whole-codeword flushes");

    auto* decompress = add_common(app.add_subcommand("decompress", "decompress a file"));
    (void)decompress;

    auto* access = add_common(app.add_subcommand("access", "read one symbol"));
    access->add_option("--pos", cfg.pos, "1-based position")->required();
    access->add_flag("--trace", cfg.trace, "print access counters");

    auto* extract = add_common(app.add_subcommand("extract", "read a substring"));
    extract->add_option("--range", cfg.range, "lo:hi, 1-based inclusive")->required();
    extract->add_flag("--trace", cfg.trace, "print access counters");

    auto* verify = add_common(app.add_subcommand("verify", "check a stream against its source"));
    verify->add_option("--original", cfg.original, "uncompressed source")->required();
    verify->add_flag("--prefix", cfg.prefix,
                     "treat the stream as a whole-codeword prefix");

    auto* gen = add_common(app.add_subcommand("gen", "generate a corpus"));
    gen->add_option("--kind", cfg.kind,
                    "random | repetitive | lb | lb-ell | lb-ext | ramp | log | dna | vocab");
    gen->add_option("--n", cfg.n, "length in symbols");
    gen->add_option("--seed", cfg.seed, "PRNG seed");
    gen->add_option("--k", cfg.k, "enumeration depth for lb kinds");
    gen->add_option("--ell", cfg.ell, "variant index for lb kinds");
    gen->add_option("--t", cfg.t, "run count for lb-ext");
    gen->add_option("--period", cfg.period, "repetition period");
    gen->add_option("--alphabet", cfg.alphabet_name, "bit | byte");

    auto* bench = add_common(app.add_subcommand("bench", "competitive-ratio sweep"));
    bench->add_option("--n", cfg.n, "generated corpus length");
    bench->add_option("--seed", cfg.seed, "base seed");
    bench->add_option("--alphabet", cfg.alphabet_name, "bit | byte");
    bench->add_option("--sweep", cfg.sweep, "comma-separated alpha values");
    bench->add_option("--seeds", cfg.seed_count, "number of seeds");
    bench->add_option("--samples", cfg.samples, "access samples per stream");
    bench->add_option("--report", cfg.report, "CSV destination (- for stdout)");

    auto* nmax = app.add_subcommand("suggest-nmax", "suggest a capacity bound");
    nmax->add_option("--estimate", cfg.estimate, "expected input size in symbols");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_param;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), cfg);
    } catch (const truncation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_malformed;
    } catch (const malformed_stream_error& e) {
        std::cerr << "error (malformed stream): " << e.what() << "\n";
        return exit_malformed;
    } catch (const bounds_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_mismatch;
    } catch (const capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_capacity;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_param;
    }
}
