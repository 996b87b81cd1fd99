#include "senatus/search.hpp"

#include <algorithm>
#include <chrono>

#include <json.hpp>

#include "senatus/errors.hpp"
#include "senatus/parser.hpp"

namespace senatus::search {

using nlohmann::json;

namespace {

std::uint64_t intersection_size(const frontend::FeatureSet& a,
                                const frontend::FeatureSet& b) {
    const auto& small = a.terms.size() <= b.terms.size() ? a : b;
    const auto& large = a.terms.size() <= b.terms.size() ? b : a;
    std::uint64_t n = 0;
    for (const auto& [term, count] : small.terms) {
        if (large.terms.count(term)) ++n;
    }
    return n;
}

std::uint64_t now_us() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

} // namespace

double containment(const frontend::FeatureSet& q, const frontend::FeatureSet& m) {
    if (q.empty()) throw EmptyQuery();
    return static_cast<double>(intersection_size(q, m)) / static_cast<double>(q.size());
}

double jaccard(const frontend::FeatureSet& q, const frontend::FeatureSet& m) {
    if (q.empty() && m.empty()) throw BothEmpty();
    std::uint64_t inter = intersection_size(q, m);
    std::uint64_t uni = q.size() + m.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

const char* rerank_name(Rerank r) {
    switch (r) {
        case Rerank::kContainment: return "containment";
        case Rerank::kJaccard: return "jaccard";
        case Rerank::kDot: return "dot";
    }
    return "?";
}

bool parse_rerank(const std::string& name, Rerank& out) {
    if (name == "containment") out = Rerank::kContainment;
    else if (name == "jaccard") out = Rerank::kJaccard;
    else if (name == "dot") out = Rerank::kDot;
    else return false;
    return true;
}

frontend::FeatureSet query_selection(const index::LshIndex& index,
                                     const frontend::FeatureSet& features,
                                     const std::map<std::string, std::uint32_t>* leaf_counts,
                                     bool* degraded) {
    const auto& manifest = index.manifest;
    if (degraded) *degraded = false;
    if (manifest.selection.mode == scoring::SelectionMode::kNone) return features;

    scoring::CorpusTermStats stats;
    if (manifest.selection.scorer == scoring::Scorer::kNspf) {
        stats.corpus_size = manifest.corpus_size;
        for (const auto& [term, count] : features.terms) {
            std::uint64_t freq = index.term_frequency(term);
            if (freq > 0) stats.term_frequency.emplace(term, freq);
        }
    }
    try {
        auto selected = scoring::select_features(features, manifest.selection, &stats,
                                                 leaf_counts);
        if (!selected.empty()) return selected;
    } catch (const EmptySelection&) {
    }
    if (degraded) *degraded = true;  // tiny queries must not silently fail
    return features;
}

QueryResponse query_features(const index::LshIndex& index,
                             const frontend::FeatureSet& features,
                             const std::map<std::string, std::uint32_t>* leaf_counts,
                             const QueryOptions& opts) {
    if (features.empty()) throw EmptyQuery();
    const auto& manifest = index.manifest;

    QueryResponse resp;
    resp.query_feature_count = features.size();

    std::uint64_t t0 = now_us();

    // Select with the index's configuration; queries are never padded.
    frontend::FeatureSet probe_set =
        query_selection(index, features, leaf_counts, &resp.degraded);

    // Map the query's full terms onto vocabulary ids for the exact rerank.
    // Terms outside the vocabulary cannot match, but they still count in
    // |F(q)|.
    const frontend::FeatureSet& rerank_set = opts.rerank_on_selected ? probe_set : features;
    std::vector<std::uint32_t> query_ids;
    query_ids.reserve(rerank_set.terms.size());
    for (const auto& [term, count] : rerank_set.terms) {
        if (auto id = index.term_id(term)) query_ids.push_back(*id);
    }
    std::sort(query_ids.begin(), query_ids.end());
    std::uint64_t query_size = rerank_set.size();

    std::uint64_t t1 = now_us();
    resp.timings.featurize_us = t1 - t0;

    // Candidate set: union of bucket matches across all bands.
    std::vector<std::uint32_t> candidates;
    if (opts.force_full_scan) {
        candidates.resize(index.records.size());
        for (std::uint32_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
    } else {
        auto sig = sketch::minhash(sketch::feature_ids(probe_set), *index.hash_family,
                                   manifest.lsh);
        auto keys = sketch::band_keys(sig, manifest.lsh);
        std::vector<std::uint8_t> seen(index.records.size(), 0);
        for (const auto& key : keys) {
            const auto& table = index.bands[key.band_index];
            auto it = table.find(key.digest);
            if (it == table.end()) continue;
            for (std::uint32_t rec : it->second) {
                if (!seen[rec]) {
                    seen[rec] = 1;
                    candidates.push_back(rec);
                }
            }
        }
        std::sort(candidates.begin(), candidates.end());
    }
    resp.candidate_count = candidates.size();

    std::uint64_t t2 = now_us();
    resp.timings.probe_us = t2 - t1;

    // Exact rerank against stored vectors.
    struct Scored {
        double key;
        QueryResult result;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (std::uint32_t rec_idx : candidates) {
        const auto& rec = index.records[rec_idx];
        std::uint64_t dot = 0;
        std::uint64_t rec_size = 0;
        if (opts.rerank_on_selected) {
            rec_size = rec.selected.size();
            auto qi = query_ids.begin();
            for (std::uint32_t id : rec.selected) {
                while (qi != query_ids.end() && *qi < id) ++qi;
                if (qi != query_ids.end() && *qi == id) ++dot;
            }
        } else {
            rec_size = rec.full.size();
            auto qi = query_ids.begin();
            for (const auto& [id, count] : rec.full) {
                while (qi != query_ids.end() && *qi < id) ++qi;
                if (qi != query_ids.end() && *qi == id) ++dot;
            }
        }
        QueryResult r;
        r.id = rec.id;
        r.dot = static_cast<std::uint32_t>(dot);
        r.containment = query_size ? static_cast<double>(dot) / static_cast<double>(query_size)
                                   : 0.0;
        std::uint64_t uni = query_size + rec_size - dot;
        r.jaccard = uni ? static_cast<double>(dot) / static_cast<double>(uni) : 0.0;
        double key = 0.0;
        switch (opts.rerank) {
            case Rerank::kContainment: key = r.containment; break;
            case Rerank::kJaccard: key = r.jaccard; break;
            case Rerank::kDot: key = static_cast<double>(r.dot); break;
        }
        scored.push_back({key, std::move(r)});
    }

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.key != b.key) return a.key > b.key;
        return a.result.id < b.result.id;
    });

    std::size_t take = std::min<std::size_t>(opts.top_n, scored.size());
    resp.results.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        scored[i].result.rank = static_cast<std::uint32_t>(i) + 1;
        resp.results.push_back(std::move(scored[i].result));
    }

    resp.timings.rerank_us = now_us() - t2;
    return resp;
}

QueryResponse query(const index::LshIndex& index, const CodeSnippet& snippet,
                    const QueryOptions& opts) {
    std::uint64_t t0 = now_us();
    auto spt = frontend::parse(snippet);
    auto features = frontend::extract_features(spt);
    features.source_id = snippet.id;
    std::uint64_t parse_us = now_us() - t0;

    QueryResponse resp;
    if (index.manifest.selection.mode != scoring::SelectionMode::kNone &&
        index.manifest.selection.scorer == scoring::Scorer::kIlf) {
        auto leaf_counts = spt.leaf_counts();
        resp = query_features(index, features, &leaf_counts, opts);
    } else {
        resp = query_features(index, features, nullptr, opts);
    }
    resp.timings.featurize_us += parse_us;
    return resp;
}

std::string response_json(const QueryResponse& response, const std::string& query_id) {
    json j;
    j["query_id"] = query_id;
    json results = json::array();
    for (const auto& r : response.results) {
        results.push_back({{"id", r.id},
                           {"containment", r.containment},
                           {"jaccard", r.jaccard},
                           {"dot", r.dot},
                           {"rank", r.rank}});
    }
    j["results"] = std::move(results);
    j["candidate_count"] = response.candidate_count;
    j["timings_us"] = {{"featurize", response.timings.featurize_us},
                       {"probe", response.timings.probe_us},
                       {"rerank", response.timings.rerank_us}};
    j["degraded"] = response.degraded;
    return j.dump();
}

} // namespace senatus::search
