// scoring.hpp - term scoring (NSPF, ILF), thresholding and selection
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "senatus/features.hpp"
#include "senatus/spt.hpp"

namespace senatus::scoring {

// Corpus-wide term occurrence counts, built once during indexing, frozen
// afterwards. Safe for concurrent reads.
struct CorpusTermStats {
    std::unordered_map<std::string, std::uint64_t> term_frequency;
    std::uint64_t corpus_size = 0;  // N, number of indexed methods

    std::size_t vocabulary_size() const { return term_frequency.size(); }

    void add(const frontend::FeatureSet& fs) {
        for (const auto& [term, count] : fs.terms) term_frequency[term] += count;
        ++corpus_size;
    }

    std::uint64_t frequency(const std::string& term) const {
        auto it = term_frequency.find(term);
        return it == term_frequency.end() ? 0 : it->second;
    }
};

struct ScoredFeature {
    std::string term;
    std::uint32_t raw_count = 0;  // count within this snippet
    double score = 0.0;
};

enum class Scorer { kNspf, kIlf };
enum class SelectionMode { kNone, kTopK, kMidN };

struct SelectionConfig {
    SelectionMode mode = SelectionMode::kTopK;
    std::uint32_t k = 100;
    double n = 95.0;  // kept band, percent
    Scorer scorer = Scorer::kNspf;
};

// NSPF: local count / corpus-wide count, clamped to (0, 1]. Terms unknown to
// the corpus vocabulary score 1.0 (a never-seen term is maximally
// distinctive).
double nspf_score(const std::string& term, std::uint32_t local_count,
                  const CorpusTermStats& stats);

// Unclamped ratio, exposed for scale-covariance checks.
double nspf_ratio(std::uint32_t local_count, std::uint64_t corpus_count);

// ILF: 1 / occurrence count of the feature's anchor leaf within its own tree.
// Corpus-independent.
double ilf_score(std::string_view term, const frontend::SimplifiedParseTree& spt);
double ilf_score(std::string_view term,
                 const std::map<std::string, std::uint32_t>& leaf_counts);

// Scores every term of a feature set. leaf_counts is required for ILF.
std::vector<ScoredFeature> score_features(
    const frontend::FeatureSet& features, Scorer scorer, const CorpusTermStats* stats,
    const std::map<std::string, std::uint32_t>* leaf_counts);

// Retains terms whose score lies in [l_lower, l_upper].
// Throws EmptySelection when nothing survives.
frontend::FeatureSet threshold_scores(const std::vector<ScoredFeature>& scored,
                                      double l_lower, double l_upper,
                                      const std::string& source_id);

// The K highest-scoring terms (all terms when fewer than K). Ties break by
// ascending term string for reproducible indexes.
frontend::FeatureSet select_top_k(const std::vector<ScoredFeature>& scored,
                                  std::uint32_t k, const std::string& source_id);

// Middle-N-percent band of the score distribution, then capped to K from the
// bottom. Throws EmptySelection when the band is empty.
frontend::FeatureSet select_mid_n(const std::vector<ScoredFeature>& scored, double n,
                                  std::uint32_t k, const std::string& source_id);

// Full score -> select pipeline per config; mode kNone returns the input.
frontend::FeatureSet select_features(
    const frontend::FeatureSet& features, const SelectionConfig& config,
    const CorpusTermStats* stats,
    const std::map<std::string, std::uint32_t>* leaf_counts);

const char* scorer_name(Scorer s);
const char* selection_mode_name(SelectionMode m);
bool parse_scorer(const std::string& name, Scorer& out);
bool parse_selection_mode(const std::string& name, SelectionMode& out);

} // namespace senatus::scoring
