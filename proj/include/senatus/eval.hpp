// eval.hpp - groundtruth construction, retrieval metrics, skew analysis,
// conciseness/diversity measurement and the scalability harness
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "senatus/index.hpp"
#include "senatus/jsonl.hpp"
#include "senatus/search.hpp"
#include "senatus/snippet.hpp"

namespace senatus::eval {

struct GroundtruthCluster {
    std::string question_id;
    std::vector<std::string> members;   // sorted snippet ids, distinct
    std::string query_id;               // seeded-deterministic member
    std::vector<std::string> relevant;  // members minus the query
};

// Clusters keyed by exact question match; singletons dropped. The query
// choice depends only on (question id, members, seed), so cluster order and
// pair order do not matter.
std::vector<GroundtruthCluster> build_groundtruth(const std::vector<QuestionPair>& pairs,
                                                  std::uint64_t seed);

struct PerQueryMetrics {
    std::string query_id;
    std::size_t relevant_count = 0;
    std::size_t retrieved = 0;
    std::size_t hits = 0;
    double precision = 0.0;         // denominator min(k, retrieved)
    double strict_precision = 0.0;  // denominator k
    double recall = 0.0;
    double f1 = 0.0;
    double strict_f1 = 0.0;
    std::uint64_t candidate_count = 0;
    std::uint64_t time_us = 0;
};

struct MetricsReport {
    std::uint32_t k = 100;
    std::size_t query_count = 0;
    // Macro averages (per-query metrics averaged over queries).
    double precision_at_k = 0.0;
    double strict_precision_at_k = 0.0;
    double recall_at_k = 0.0;
    double f1_at_k = 0.0;
    double strict_f1_at_k = 0.0;
    double mean_query_time_us = 0.0;
    double mean_candidate_count = 0.0;
    std::uint64_t median_candidate_count = 0;
    std::uint64_t max_candidate_count = 0;
    std::vector<PerQueryMetrics> per_query;
};

struct EvaluateOptions {
    std::uint32_t k = 100;
    search::Rerank rerank = search::Rerank::kContainment;
    bool force_full_scan = false;
    unsigned threads = 0;
};

// Runs every cluster's query against the index. Queries are expected to be
// excluded from the index; a self-hit is dropped from the ranking. Throws
// EmptyGroundtruth on an empty cluster list, IoError on unresolvable ids.
MetricsReport evaluate(const index::LshIndex& index,
                       const std::vector<GroundtruthCluster>& clusters,
                       const std::unordered_map<std::string, CodeSnippet>& snippets,
                       const EvaluateOptions& opts = {});

std::string metrics_json(const MetricsReport& report);
std::string metrics_csv(const MetricsReport& report);  // one row per query

// ---- feature-length distribution --------------------------------------------

struct PowerLawFit {
    bool fitted = false;
    double slope = 0.0;
    double intercept = 0.0;  // of log10(count) vs log10(length)
    double r2 = 0.0;
    std::size_t points = 0;  // histogram points used
    std::string reason;      // set when not fitted
};

struct LengthDistribution {
    std::map<std::uint64_t, std::uint64_t> histogram;  // feature length -> count
    std::size_t sample_size = 0;
    PowerLawFit fit;
};

// Histogram of per-snippet distinct-feature lengths plus a log-log
// least-squares fit (head below the 5th and tail above the 99.5th length
// percentile are dropped before fitting). Throws InsufficientData when fewer
// than 100 snippets featurize.
LengthDistribution length_distribution(const std::vector<CodeSnippet>& corpus);

// Fit core over pre-computed lengths (oracle-friendly).
LengthDistribution length_distribution_from_lengths(
    const std::vector<std::uint64_t>& lengths);

// CSV: "# power_law slope=... intercept=... r2=... fitted=..." header line,
// then length,count rows.
std::string histogram_csv(const LengthDistribution& dist);

// ---- conciseness & diversity -------------------------------------------------

struct QueryResultSet {
    std::uint64_t query_feature_count = 0;
    std::vector<std::string> result_ids;
};

struct ConcisenessDiversityReport {
    std::size_t queries = 0;        // with at least one result
    std::size_t pair_queries = 0;   // with at least two results
    double mean_length_ratio = 0.0;     // |F(candidate)| / |F(query)|, pooled
    double median_length_ratio = 0.0;
    // Mean pairwise similarity among each query's results, averaged over
    // queries: Jaccard over unordered pairs, containment over ordered pairs.
    double mean_pairwise_jaccard = 0.0;
    double mean_pairwise_containment = 0.0;
};

ConcisenessDiversityReport conciseness_diversity(const std::vector<QueryResultSet>& results,
                                                 const index::LshIndex& index);

std::string conciseness_json(const ConcisenessDiversityReport& report);

// ---- scalability --------------------------------------------------------------

struct BenchOptions {
    sketch::LshParams lsh;
    scoring::SelectionConfig selection;
    std::size_t query_pool = 100;
    std::uint32_t top_n = 100;
    std::uint64_t seed = 42;
    unsigned threads = 0;
};

struct BenchPoint {
    std::size_t corpus_size = 0;       // records stored
    int quartile = 0;                  // 1..4 by query feature length
    std::size_t queries = 0;
    double mean_candidates = 0.0;      // LSH comparisons per query
    double mean_lsh_us = 0.0;
    double mean_scan_us = 0.0;         // brute-force baseline
    std::uint64_t scan_comparisons = 0;  // = corpus size, by construction
};

struct BenchReport {
    std::vector<BenchPoint> points;      // per (size, quartile)
    std::vector<BenchPoint> per_size;    // quartile = 0 aggregate rows
};

// Synthetic power-law corpora at each size, one fixed query pool bucketed
// into feature-length quartiles; measures LSH candidate counts and wall time
// against a brute-force scan baseline.
BenchReport scalability_bench(const std::vector<std::size_t>& corpus_sizes,
                              const BenchOptions& opts = {});

std::string bench_csv(const BenchReport& report);

} // namespace senatus::eval
