#include "senatus/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "senatus/errors.hpp"

namespace senatus::scoring {

double nspf_ratio(std::uint32_t local_count, std::uint64_t corpus_count) {
    if (corpus_count == 0) return 1.0;
    return static_cast<double>(local_count) / static_cast<double>(corpus_count);
}

double nspf_score(const std::string& term, std::uint32_t local_count,
                  const CorpusTermStats& stats) {
    std::uint64_t global = stats.frequency(term);
    if (global == 0) return 1.0;  // unknown term: maximally distinctive
    return std::min(1.0, nspf_ratio(local_count, global));
}

double ilf_score(std::string_view term,
                 const std::map<std::string, std::uint32_t>& leaf_counts) {
    std::string anchor = frontend::anchor_leaf(term);
    auto it = leaf_counts.find(anchor);
    std::uint32_t count = it == leaf_counts.end() ? 1 : std::max<std::uint32_t>(1, it->second);
    return 1.0 / static_cast<double>(count);
}

double ilf_score(std::string_view term, const frontend::SimplifiedParseTree& spt) {
    return ilf_score(term, spt.leaf_counts());
}

std::vector<ScoredFeature> score_features(
    const frontend::FeatureSet& features, Scorer scorer, const CorpusTermStats* stats,
    const std::map<std::string, std::uint32_t>* leaf_counts) {
    std::vector<ScoredFeature> out;
    out.reserve(features.terms.size());
    for (const auto& [term, count] : features.terms) {
        ScoredFeature sf;
        sf.term = term;
        sf.raw_count = count;
        if (scorer == Scorer::kNspf) {
            sf.score = stats ? nspf_score(term, count, *stats) : 1.0;
        } else {
            sf.score = leaf_counts ? ilf_score(term, *leaf_counts) : 1.0;
        }
        out.push_back(std::move(sf));
    }
    return out;
}

namespace {

// Descending score, ties by ascending term.
std::vector<const ScoredFeature*> ranked(const std::vector<ScoredFeature>& scored) {
    std::vector<const ScoredFeature*> order;
    order.reserve(scored.size());
    for (const auto& sf : scored) order.push_back(&sf);
    std::stable_sort(order.begin(), order.end(),
                     [](const ScoredFeature* a, const ScoredFeature* b) {
                         if (a->score != b->score) return a->score > b->score;
                         return a->term < b->term;
                     });
    return order;
}

} // namespace

frontend::FeatureSet threshold_scores(const std::vector<ScoredFeature>& scored,
                                      double l_lower, double l_upper,
                                      const std::string& source_id) {
    frontend::FeatureSet out;
    out.source_id = source_id;
    for (const auto& sf : scored) {
        if (sf.score >= l_lower && sf.score <= l_upper) {
            out.terms[sf.term] = sf.raw_count;
        }
    }
    if (out.terms.empty()) throw EmptySelection();
    return out;
}

frontend::FeatureSet select_top_k(const std::vector<ScoredFeature>& scored,
                                  std::uint32_t k, const std::string& source_id) {
    auto order = ranked(scored);
    frontend::FeatureSet out;
    out.source_id = source_id;
    std::size_t take = std::min<std::size_t>(k, order.size());
    for (std::size_t i = 0; i < take; ++i) {
        out.terms[order[i]->term] = order[i]->raw_count;
    }
    return out;
}

frontend::FeatureSet select_mid_n(const std::vector<ScoredFeature>& scored, double n,
                                  std::uint32_t k, const std::string& source_id) {
    auto order = ranked(scored);
    std::size_t total = order.size();
    // Symmetric trim: (100 - N)/2 percent from each tail, by count.
    auto per_side = static_cast<std::size_t>(
        std::floor(static_cast<double>(total) * (100.0 - n) / 200.0 + 1e-9));
    if (per_side * 2 >= total) throw EmptySelection();

    frontend::FeatureSet out;
    out.source_id = source_id;
    std::size_t begin = per_side;
    std::size_t end = total - per_side;
    std::size_t take = std::min<std::size_t>(k, end - begin);  // cap drops the bottom
    for (std::size_t i = begin; i < begin + take; ++i) {
        out.terms[order[i]->term] = order[i]->raw_count;
    }
    return out;
}

frontend::FeatureSet select_features(
    const frontend::FeatureSet& features, const SelectionConfig& config,
    const CorpusTermStats* stats,
    const std::map<std::string, std::uint32_t>* leaf_counts) {
    if (config.mode == SelectionMode::kNone) return features;
    auto scored = score_features(features, config.scorer, stats, leaf_counts);
    if (config.mode == SelectionMode::kTopK) {
        return select_top_k(scored, config.k, features.source_id);
    }
    return select_mid_n(scored, config.n, config.k, features.source_id);
}

const char* scorer_name(Scorer s) {
    return s == Scorer::kNspf ? "nspf" : "ilf";
}

const char* selection_mode_name(SelectionMode m) {
    switch (m) {
        case SelectionMode::kNone: return "none";
        case SelectionMode::kTopK: return "topk";
        case SelectionMode::kMidN: return "midn";
    }
    return "?";
}

bool parse_scorer(const std::string& name, Scorer& out) {
    if (name == "nspf") out = Scorer::kNspf;
    else if (name == "ilf") out = Scorer::kIlf;
    else return false;
    return true;
}

bool parse_selection_mode(const std::string& name, SelectionMode& out) {
    if (name == "none") out = SelectionMode::kNone;
    else if (name == "topk") out = SelectionMode::kTopK;
    else if (name == "midn") out = SelectionMode::kMidN;
    else return false;
    return true;
}

} // namespace senatus::scoring
