// search.hpp - query pipeline: featurize, select, probe buckets, exact rerank
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "senatus/features.hpp"
#include "senatus/index.hpp"
#include "senatus/snippet.hpp"

namespace senatus::search {

// Containment(q, m) = |F(q) n F(m)| / |F(q)| over distinct terms.
// Asymmetric: favors long candidates. Throws EmptyQuery.
double containment(const frontend::FeatureSet& q, const frontend::FeatureSet& m);

// Jaccard(q, m) = |n| / |u| over distinct terms. Throws BothEmpty.
double jaccard(const frontend::FeatureSet& q, const frontend::FeatureSet& m);

enum class Rerank { kContainment, kJaccard, kDot };

const char* rerank_name(Rerank r);
bool parse_rerank(const std::string& name, Rerank& out);

struct QueryOptions {
    std::uint32_t top_n = 100;
    Rerank rerank = Rerank::kContainment;
    // Rerank every stored record instead of probing buckets (exhaustive
    // oracle mode used by evaluation and tests).
    bool force_full_scan = false;
    // Rerank on selected vectors instead of the default full vectors.
    bool rerank_on_selected = false;
};

struct QueryResult {
    std::string id;
    double containment = 0.0;
    double jaccard = 0.0;
    std::uint32_t dot = 0;  // intersection size
    std::uint32_t rank = 0; // 1-based
};

struct QueryTimings {
    std::uint64_t featurize_us = 0;
    std::uint64_t probe_us = 0;
    std::uint64_t rerank_us = 0;
};

struct QueryResponse {
    std::vector<QueryResult> results;   // rerank score desc, ties by id asc
    std::uint64_t candidate_count = 0;  // bucket-union size before rerank
    QueryTimings timings;
    bool degraded = false;  // selection emptied; raw features were used
    std::uint64_t query_feature_count = 0;  // |F(q)|, distinct
};

// Full pipeline from source text. Selection follows the index's manifest
// (queries are never padded). Throws ParseError / EmptyQuery.
QueryResponse query(const index::LshIndex& index, const CodeSnippet& snippet,
                    const QueryOptions& opts = {});

// Pipeline from a pre-extracted feature set. leaf_counts is consulted only
// for ILF-configured indexes and may be null otherwise.
QueryResponse query_features(const index::LshIndex& index,
                             const frontend::FeatureSet& features,
                             const std::map<std::string, std::uint32_t>* leaf_counts,
                             const QueryOptions& opts = {});

// Query-side selection per the index's configuration (queries are never
// padded). Falls back to the raw features when selection empties; *degraded
// reports the fallback.
frontend::FeatureSet query_selection(const index::LshIndex& index,
                                     const frontend::FeatureSet& features,
                                     const std::map<std::string, std::uint32_t>* leaf_counts,
                                     bool* degraded = nullptr);

// Machine-readable result: {query_id, results, candidate_count, timings_us,
// degraded}.
std::string response_json(const QueryResponse& response, const std::string& query_id);

} // namespace senatus::search
