// synthetic.hpp - deterministic synthetic corpora for benchmarks and tests
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "senatus/jsonl.hpp"
#include "senatus/snippet.hpp"

namespace senatus::synth {

// Zipf(alpha) sampler via inverse CDF; deterministic per RNG state.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double alpha);                   // values 1..n
    ZipfSampler(std::size_t lo, std::size_t hi, double alpha);  // values lo..hi
    std::size_t sample(std::uint64_t& rng_state) const;

private:
    std::size_t lo_ = 1;
    std::vector<double> cdf_;
};

struct PowerLawOptions {
    double alpha = 2.0;          // exponent of the snippet-length law
    std::size_t min_len = 3;     // statements per snippet
    std::size_t max_len = 200;
    // Identifier pool scales with the corpus so vocabulary grows with it,
    // mirroring real repositories; popularity within the pool is mildly
    // skewed.
    double pool_factor = 4.0;
    std::size_t pool_min = 256;
    double pool_alpha = 0.8;
    std::string id_prefix = "syn";
    std::string token_prefix = "syn";
    std::string language = "mini";
};

// Corpus of statement-sequence snippets whose lengths follow a power law.
std::vector<CodeSnippet> power_law_corpus(std::size_t n, std::uint64_t seed,
                                          const PowerLawOptions& opts = {});

std::size_t default_pool(std::size_t n, const PowerLawOptions& opts = {});

std::vector<std::size_t> sample_power_law_lengths(std::size_t count, std::uint64_t seed,
                                                  const PowerLawOptions& opts = {});

// Snippets with caller-fixed lengths over an explicit pool size; lets the
// scalability harness keep one query pool comparable across corpus sizes.
std::vector<CodeSnippet> fixed_length_snippets(const std::vector<std::size_t>& lengths,
                                               std::size_t pool, std::uint64_t seed,
                                               const PowerLawOptions& opts = {});

struct ClusterOptions {
    std::size_t clusters = 30;
    std::size_t members_min = 10;
    std::size_t members_max = 14;
    std::size_t api_tokens_min = 8;   // distinctive identifiers shared by a cluster
    std::size_t api_tokens_max = 12;
    double member_api_keep = 0.9;     // fraction of cluster tokens each member uses
    std::size_t distractors = 2000;
    // Noise is built from a pool of idiomatic phrases (shared token n-grams)
    // over common and mid-frequency identifiers; per-snippet phrase counts
    // follow a power law - the length skew under test.
    std::size_t common_pool = 60;
    std::size_t mid_pool = 3000;
    double common_prob = 0.35;
    std::size_t phrase_pool = 700;
    double phrase_alpha = 0.9;
    std::size_t phrase_len_min = 3;
    std::size_t phrase_len_max = 8;
    double noise_alpha = 1.3;   // law of phrases-per-snippet
    std::size_t noise_min = 1;  // phrases per snippet
    std::size_t noise_max = 36;
    std::string id_prefix = "cl";
    std::string language = "mini";
};

struct ClusteredCorpus {
    std::vector<CodeSnippet> snippets;   // members + distractors
    std::vector<QuestionPair> pairs;     // cluster id -> member snippet ids
};

// Clustered corpus where relevance = shared API-identifier tokens and snippet
// lengths are power-law skewed.
ClusteredCorpus clustered_corpus(std::uint64_t seed, const ClusterOptions& opts = {});

} // namespace senatus::synth
