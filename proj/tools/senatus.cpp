// senatus.cpp - operator CLI: ingest, index, query, eval, stats
//
// Exit codes: 0 success, 1 I/O, 2 usage/validation, 3 index errors.
// Logs go to stderr; data goes to stdout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "senatus/errors.hpp"
#include "senatus/eval.hpp"
#include "senatus/index.hpp"
#include "senatus/ingest.hpp"
#include "senatus/jsonl.hpp"
#include "senatus/logging.hpp"
#include "senatus/minhash.hpp"
#include "senatus/parser.hpp"
#include "senatus/search.hpp"

namespace fs = std::filesystem;
using namespace senatus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIndex = 3;

struct GlobalConfig {
    unsigned threads = 0;  // 0: hardware parallelism
    std::string log = "info";
};

void apply_log_level(const std::string& name) {
    LogLevel level;
    if (!parse_log_level(name, level)) {
        throw CLI::ValidationError("--log", "expected error|warn|info|debug");
    }
    set_log_level(level);
}

std::string read_stream(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_ingest(const std::string& src, const std::string& out) {
    ingest::IngestReport report;
    std::vector<CodeSnippet> snippets;
    if (fs::is_directory(src)) {
        snippets = ingest::ingest_directory(src, &report);
    } else if (fs::is_regular_file(src)) {
        snippets = ingest::ingest_jsonl(src, &report);
    } else {
        log_error("unreadable source: " + src);
        return kExitIo;
    }
    write_corpus_jsonl(out, snippets);
    log_info("ingest: " + std::to_string(report.files_scanned) + " inputs, " +
             std::to_string(snippets.size()) + " records, " +
             std::to_string(report.parse_failures) + " parse failures");
    std::printf("records=%zu parse_failures=%llu\n", snippets.size(),
                static_cast<unsigned long long>(report.parse_failures));
    return kExitOk;
}

struct IndexArgs {
    std::string corpus;
    std::string out_dir;
    std::string scorer = "nspf";
    std::string selector = "topk";
    std::uint32_t k = 100;
    double n = 95.0;
    std::uint32_t bands = 50;
    std::uint32_t rows = 2;
    std::uint64_t seed = 42;
};

int run_index(const IndexArgs& args, const GlobalConfig& global) {
    index::BuildOptions opts;
    opts.lsh.bands = args.bands;
    opts.lsh.rows = args.rows;
    opts.lsh.seed = args.seed;
    opts.lsh.maxlength = args.k;
    opts.threads = global.threads;
    if (!scoring::parse_scorer(args.scorer, opts.selection.scorer) ||
        !scoring::parse_selection_mode(args.selector, opts.selection.mode)) {
        log_error("invalid --scorer/--selector");
        return kExitUsage;
    }
    opts.selection.k = args.k;
    opts.selection.n = args.n;

    log_info("index: seed=" + std::to_string(args.seed) + " bands=" +
             std::to_string(args.bands) + " rows=" + std::to_string(args.rows) +
             " selector=" + args.selector + " scorer=" + args.scorer +
             " k=" + std::to_string(args.k) + " n=" + std::to_string(args.n));

    JsonlCorpusReader reader(args.corpus);
    index::BuildReport report;
    auto idx = index::build_index(reader, opts, &report);
    index::save_index(idx, args.out_dir, &report);

    double threshold = sketch::lsh_threshold(args.bands, args.rows);
    std::printf(
        "records_in=%llu stored=%llu dedup_dropped=%llu parse_failures=%llu "
        "vocabulary=%llu bytes=%llu approx_threshold=%.4f\n",
        static_cast<unsigned long long>(report.records_in),
        static_cast<unsigned long long>(report.records_stored),
        static_cast<unsigned long long>(report.dedup_dropped),
        static_cast<unsigned long long>(report.parse_failures),
        static_cast<unsigned long long>(report.vocabulary_size),
        static_cast<unsigned long long>(report.bytes_written), threshold);
    return kExitOk;
}

struct QueryArgs {
    std::string index_dir;
    std::string file;
    bool use_stdin = false;
    std::string language = "java";
    std::uint32_t top_n = 100;
    std::string rerank = "containment";
    bool json = false;
};

int run_query(const QueryArgs& args) {
    index::LshIndex idx;
    try {
        idx = index::load_index(args.index_dir);
    } catch (const Error& e) {
        log_error(std::string("cannot load index: ") + e.what());
        return kExitIndex;
    }

    CodeSnippet snippet;
    snippet.language = args.language;
    if (args.use_stdin) {
        snippet.id = "<stdin>";
        snippet.text = read_stream(std::cin);
    } else {
        std::ifstream f(args.file, std::ios::binary);
        if (!f) {
            log_error("cannot read query file: " + args.file);
            return kExitIo;
        }
        snippet.id = args.file;
        snippet.text = read_stream(f);
    }
    if (snippet.text.empty()) {
        log_error("empty query");
        return kExitUsage;
    }

    search::QueryOptions opts;
    opts.top_n = args.top_n;
    if (!search::parse_rerank(args.rerank, opts.rerank)) {
        log_error("invalid --rerank");
        return kExitUsage;
    }

    search::QueryResponse resp;
    try {
        resp = search::query(idx, snippet, opts);
    } catch (const ParseError& e) {
        log_error(std::string("query does not parse: ") + e.what());
        return kExitUsage;
    } catch (const EmptyQuery&) {
        log_error("query has no extractable features");
        return kExitUsage;
    }

    if (args.json) {
        std::printf("%s\n", search::response_json(resp, snippet.id).c_str());
        return kExitOk;
    }
    std::printf("rank  containment  jaccard  dot  id\n");
    for (const auto& r : resp.results) {
        std::printf("%4u  %11.4f  %7.4f  %3u  %s\n", r.rank, r.containment, r.jaccard,
                    r.dot, r.id.c_str());
    }
    std::printf("# candidates=%llu featurize_us=%llu probe_us=%llu rerank_us=%llu%s\n",
                static_cast<unsigned long long>(resp.candidate_count),
                static_cast<unsigned long long>(resp.timings.featurize_us),
                static_cast<unsigned long long>(resp.timings.probe_us),
                static_cast<unsigned long long>(resp.timings.rerank_us),
                resp.degraded ? " degraded=true" : "");
    return kExitOk;
}

struct EvalArgs {
    std::string index_dir;
    std::string groundtruth;
    std::string corpus;
    std::uint32_t k = 100;
    std::uint64_t seed = 42;
    std::string out_csv;
};

int run_eval(const EvalArgs& args, const GlobalConfig& global) {
    index::LshIndex idx;
    try {
        idx = index::load_index(args.index_dir);
    } catch (const Error& e) {
        log_error(std::string("cannot load index: ") + e.what());
        return kExitIndex;
    }
    auto pairs = read_groundtruth_jsonl(args.groundtruth);
    auto clusters = eval::build_groundtruth(pairs, args.seed);
    if (clusters.empty()) {
        log_error("groundtruth has no multi-member questions");
        return kExitUsage;
    }
    auto snippets = corpus_by_id(read_corpus_jsonl(args.corpus));

    eval::EvaluateOptions opts;
    opts.k = args.k;
    opts.threads = global.threads;
    log_info("eval: seed=" + std::to_string(args.seed) + " k=" + std::to_string(args.k) +
             " clusters=" + std::to_string(clusters.size()));

    eval::MetricsReport report;
    try {
        report = eval::evaluate(idx, clusters, snippets, opts);
    } catch (const IoError& e) {
        log_error(e.what());
        return kExitUsage;
    }
    if (!args.out_csv.empty()) {
        std::ofstream f(args.out_csv, std::ios::binary);
        if (!f) {
            log_error("cannot write " + args.out_csv);
            return kExitIo;
        }
        f << eval::metrics_csv(report);
    }
    std::printf("%s\n", eval::metrics_json(report).c_str());
    return kExitOk;
}

struct StatsArgs {
    std::string input;  // corpus jsonl or index directory
    std::string out;
};

int run_stats(const StatsArgs& args) {
    eval::LengthDistribution dist;
    if (fs::is_directory(args.input)) {
        index::LshIndex idx;
        try {
            idx = index::load_index(args.input);
        } catch (const Error& e) {
            log_error(std::string("cannot load index: ") + e.what());
            return kExitIndex;
        }
        std::vector<std::uint64_t> lengths;
        lengths.reserve(idx.records.size());
        for (const auto& r : idx.records) lengths.push_back(r.full.size());
        dist = eval::length_distribution_from_lengths(lengths);
    } else {
        dist = eval::length_distribution(read_corpus_jsonl(args.input));
    }
    std::string csv = eval::histogram_csv(dist);
    if (args.out.empty()) {
        std::fwrite(csv.data(), 1, csv.size(), stdout);
    } else {
        std::ofstream f(args.out, std::ios::binary);
        if (!f) {
            log_error("cannot write " + args.out);
            return kExitIo;
        }
        f << csv;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"senatus - code-to-code recommendation over MinHash-LSH"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value overlay; flags take precedence");

    GlobalConfig global;
    app.add_option("--threads", global.threads,
                   "worker thread cap (default: hardware parallelism)")
        ->envname("SENATUS_THREADS");
    app.add_option("--log", global.log, "log level: error|warn|info|debug")
        ->envname("SENATUS_LOG");

    auto* ingest_cmd =
        app.add_subcommand("ingest", "emit corpus JSONL from a source tree or corpus file");
    std::string ingest_src, ingest_out;
    ingest_cmd->add_option("src", ingest_src, "source directory or corpus JSONL")->required();
    ingest_cmd->add_option("out", ingest_out, "output corpus JSONL path")->required();

    auto* index_cmd = app.add_subcommand("index", "build an LSH index from corpus JSONL");
    IndexArgs index_args;
    index_cmd->add_option("corpus", index_args.corpus, "corpus JSONL")->required();
    index_cmd->add_option("out", index_args.out_dir, "index output directory")->required();
    index_cmd->add_option("--scorer", index_args.scorer, "nspf|ilf (default nspf)")
        ->check(CLI::IsMember({"nspf", "ilf"}));
    auto* selector_opt =
        index_cmd->add_option("--selector", index_args.selector, "topk|midn (default topk)")
            ->check(CLI::IsMember({"topk", "midn"}));
    auto* k_opt = index_cmd->add_option("--k", index_args.k,
                                        "selection cap K (default 100)")
                      ->check(CLI::Range(1u, 1000000u));
    auto* n_opt = index_cmd->add_option(
        "--n", index_args.n, "kept percentile band for midn (default 95)");
    index_cmd->add_option("--bands", index_args.bands, "LSH bands B (default 50)")
        ->check(CLI::Range(1u, 100000u));
    index_cmd->add_option("--rows", index_args.rows, "rows per band R (default 2)")
        ->check(CLI::Range(1u, 64u));
    index_cmd->add_option("--seed", index_args.seed, "hash family seed (default 42)");

    auto* query_cmd = app.add_subcommand("query", "search an index with a code snippet");
    QueryArgs query_args;
    query_cmd->add_option("index", query_args.index_dir, "index directory")->required();
    auto* file_opt = query_cmd->add_option("--file", query_args.file, "query snippet file");
    auto* stdin_opt = query_cmd->add_flag("--stdin", query_args.use_stdin,
                                          "read the query snippet from stdin");
    query_cmd->add_option("--language", query_args.language, "query language (default java)");
    query_cmd->add_option("--topn", query_args.top_n, "results to return (default 100)")
        ->check(CLI::Range(1u, 1000000u));
    query_cmd->add_option("--rerank", query_args.rerank,
                          "containment|jaccard|dot (default containment)")
        ->check(CLI::IsMember({"containment", "jaccard", "dot"}));
    query_cmd->add_flag("--json", query_args.json, "machine-readable output");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate retrieval against groundtruth");
    EvalArgs eval_args;
    eval_cmd->add_option("index", eval_args.index_dir, "index directory")->required();
    eval_cmd->add_option("groundtruth", eval_args.groundtruth,
                         "groundtruth JSONL: {question_id, snippet_id}")
        ->required();
    eval_cmd->add_option("--corpus", eval_args.corpus, "corpus JSONL with query snippets")
        ->required();
    eval_cmd->add_option("--k", eval_args.k, "metric depth (default 100)")
        ->check(CLI::Range(1u, 1000000u));
    eval_cmd->add_option("--seed", eval_args.seed, "query sampling seed (default 42)");
    eval_cmd->add_option("--out-csv", eval_args.out_csv, "write per-query rows as CSV");

    auto* stats_cmd =
        app.add_subcommand("stats", "feature-length histogram and power-law fit");
    StatsArgs stats_args;
    stats_cmd->add_option("input", stats_args.input, "corpus JSONL or index directory")
        ->required();
    stats_cmd->add_option("--out", stats_args.out, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        apply_log_level(global.log);
    } catch (const CLI::Error&) {
        log_error("invalid --log level: " + global.log);
        return kExitUsage;
    }
    log_info("config: threads=" + std::to_string(global.threads) + " log=" + global.log);

    try {
        if (*ingest_cmd) return run_ingest(ingest_src, ingest_out);
        if (*index_cmd) {
            if (n_opt->count() > 0 && index_args.selector != "midn") {
                log_error("--n requires --selector midn");
                return kExitUsage;
            }
            if (k_opt->count() > 0 && index_args.k == 0) return kExitUsage;
            if (n_opt->count() > 0 && !(index_args.n > 0.0 && index_args.n <= 100.0)) {
                log_error("--n must be in (0, 100]");
                return kExitUsage;
            }
            (void)selector_opt;
            return run_index(index_args, global);
        }
        if (*query_cmd) {
            if (file_opt->count() == 0 && stdin_opt->count() == 0) {
                log_error("query needs --file or --stdin");
                return kExitUsage;
            }
            return run_query(query_args);
        }
        if (*eval_cmd) return run_eval(eval_args, global);
        if (*stats_cmd) return run_stats(stats_args);
    } catch (const UnsupportedLanguage& e) {
        log_error(e.what());
        return kExitUsage;
    } catch (const InsufficientData& e) {
        log_error(e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        log_error(e.what());
        return kExitIo;
    } catch (const Error& e) {
        log_error(e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        log_error(std::string("unexpected error: ") + e.what());
        return kExitIo;
    }
    return kExitUsage;
}
