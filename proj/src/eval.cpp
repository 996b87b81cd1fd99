#include "senatus/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "senatus/errors.hpp"
#include "senatus/fingerprint.hpp"
#include "senatus/logging.hpp"
#include "senatus/parallel.hpp"
#include "senatus/parser.hpp"
#include "senatus/synthetic.hpp"

namespace senatus::eval {

using nlohmann::json;

std::vector<GroundtruthCluster> build_groundtruth(const std::vector<QuestionPair>& pairs,
                                                  std::uint64_t seed) {
    std::map<std::string, std::set<std::string>> grouped;
    for (const auto& p : pairs) grouped[p.question_id].insert(p.snippet_id);

    std::vector<GroundtruthCluster> out;
    for (const auto& [question, members] : grouped) {
        if (members.size() < 2) continue;  // no relevant set without >= 2 members
        GroundtruthCluster c;
        c.question_id = question;
        c.members.assign(members.begin(), members.end());
        // Deterministic and invariant to cluster/pair order: the choice
        // depends only on the question id, the member set and the seed.
        std::uint64_t state = fnv1a64(question) ^ seed;
        std::size_t pick = splitmix64(state) % c.members.size();
        c.query_id = c.members[pick];
        for (const auto& m : c.members) {
            if (m != c.query_id) c.relevant.push_back(m);
        }
        out.push_back(std::move(c));
    }
    return out;  // sorted by question id via std::map
}

MetricsReport evaluate(const index::LshIndex& index,
                       const std::vector<GroundtruthCluster>& clusters,
                       const std::unordered_map<std::string, CodeSnippet>& snippets,
                       const EvaluateOptions& opts) {
    if (clusters.empty()) throw EmptyGroundtruth();

    for (const auto& c : clusters) {
        if (!snippets.count(c.query_id)) {
            throw IoError("groundtruth query snippet not found in corpus: " + c.query_id);
        }
    }

    MetricsReport report;
    report.k = opts.k;
    report.query_count = clusters.size();
    report.per_query.resize(clusters.size());

    search::QueryOptions qopts;
    qopts.top_n = opts.k;
    qopts.rerank = opts.rerank;
    qopts.force_full_scan = opts.force_full_scan;

    parallel_for(clusters.size(), opts.threads, [&](std::size_t i) {
        const auto& cluster = clusters[i];
        PerQueryMetrics& pq = report.per_query[i];
        pq.query_id = cluster.query_id;
        pq.relevant_count = cluster.relevant.size();

        auto resp = search::query(index, snippets.at(cluster.query_id), qopts);
        pq.candidate_count = resp.candidate_count;
        pq.time_us = resp.timings.featurize_us + resp.timings.probe_us +
                     resp.timings.rerank_us;

        std::unordered_set<std::string> relevant(cluster.relevant.begin(),
                                                 cluster.relevant.end());
        for (const auto& r : resp.results) {
            if (r.id == cluster.query_id) continue;  // queries never count as hits
            ++pq.retrieved;
            if (relevant.count(r.id)) ++pq.hits;
            if (pq.retrieved == opts.k) break;
        }
        double hits = static_cast<double>(pq.hits);
        pq.precision = pq.retrieved
                           ? hits / static_cast<double>(std::min<std::size_t>(opts.k,
                                                                              pq.retrieved))
                           : 0.0;
        pq.strict_precision = hits / static_cast<double>(opts.k);
        pq.recall = pq.relevant_count ? hits / static_cast<double>(pq.relevant_count) : 0.0;
        pq.f1 = (pq.precision + pq.recall) > 0.0
                    ? 2.0 * pq.precision * pq.recall / (pq.precision + pq.recall)
                    : 0.0;
        pq.strict_f1 = (pq.strict_precision + pq.recall) > 0.0
                           ? 2.0 * pq.strict_precision * pq.recall /
                                 (pq.strict_precision + pq.recall)
                           : 0.0;
    });

    std::vector<std::uint64_t> candidates;
    candidates.reserve(report.per_query.size());
    for (const auto& pq : report.per_query) {
        report.precision_at_k += pq.precision;
        report.strict_precision_at_k += pq.strict_precision;
        report.recall_at_k += pq.recall;
        report.f1_at_k += pq.f1;
        report.strict_f1_at_k += pq.strict_f1;
        report.mean_query_time_us += static_cast<double>(pq.time_us);
        report.mean_candidate_count += static_cast<double>(pq.candidate_count);
        report.max_candidate_count = std::max(report.max_candidate_count, pq.candidate_count);
        candidates.push_back(pq.candidate_count);
    }
    double n = static_cast<double>(report.per_query.size());
    report.precision_at_k /= n;
    report.strict_precision_at_k /= n;
    report.recall_at_k /= n;
    report.f1_at_k /= n;
    report.strict_f1_at_k /= n;
    report.mean_query_time_us /= n;
    report.mean_candidate_count /= n;
    std::sort(candidates.begin(), candidates.end());
    report.median_candidate_count = candidates[candidates.size() / 2];
    return report;
}

std::string metrics_json(const MetricsReport& report) {
    json j;
    j["k"] = report.k;
    j["queries"] = report.query_count;
    j["precision_at_k"] = report.precision_at_k;
    j["strict_precision_at_k"] = report.strict_precision_at_k;
    j["recall_at_k"] = report.recall_at_k;
    j["f1_at_k"] = report.f1_at_k;
    j["strict_f1_at_k"] = report.strict_f1_at_k;
    j["mean_query_time_us"] = report.mean_query_time_us;
    j["candidate_count"] = {{"mean", report.mean_candidate_count},
                            {"median", report.median_candidate_count},
                            {"max", report.max_candidate_count}};
    json rows = json::array();
    for (const auto& pq : report.per_query) {
        rows.push_back({{"query_id", pq.query_id},
                        {"relevant", pq.relevant_count},
                        {"retrieved", pq.retrieved},
                        {"hits", pq.hits},
                        {"precision", pq.precision},
                        {"strict_precision", pq.strict_precision},
                        {"recall", pq.recall},
                        {"f1", pq.f1},
                        {"strict_f1", pq.strict_f1},
                        {"candidates", pq.candidate_count},
                        {"time_us", pq.time_us}});
    }
    j["per_query"] = std::move(rows);
    return j.dump(2);
}

std::string metrics_csv(const MetricsReport& report) {
    std::string csv =
        "query_id,relevant,retrieved,hits,precision,strict_precision,recall,f1,"
        "strict_f1,candidates,time_us\n";
    for (const auto& pq : report.per_query) {
        csv += pq.query_id + ',' + std::to_string(pq.relevant_count) + ',' +
               std::to_string(pq.retrieved) + ',' + std::to_string(pq.hits) + ',' +
               std::to_string(pq.precision) + ',' + std::to_string(pq.strict_precision) +
               ',' + std::to_string(pq.recall) + ',' + std::to_string(pq.f1) + ',' +
               std::to_string(pq.strict_f1) + ',' + std::to_string(pq.candidate_count) +
               ',' + std::to_string(pq.time_us) + '\n';
    }
    return csv;
}

namespace {

std::uint64_t nearest_rank(const std::vector<std::uint64_t>& sorted, double percentile) {
    if (sorted.empty()) return 0;
    double rank = percentile / 100.0 * static_cast<double>(sorted.size());
    auto idx = static_cast<std::size_t>(std::ceil(rank));
    if (idx < 1) idx = 1;
    if (idx > sorted.size()) idx = sorted.size();
    return sorted[idx - 1];
}

} // namespace

LengthDistribution length_distribution_from_lengths(
    const std::vector<std::uint64_t>& lengths) {
    LengthDistribution dist;
    dist.sample_size = lengths.size();
    for (std::uint64_t len : lengths) ++dist.histogram[len];

    std::vector<std::uint64_t> sorted = lengths;
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t lo = nearest_rank(sorted, 5.0);
    std::uint64_t hi = nearest_rank(sorted, 99.5);

    std::vector<double> xs, ys;
    for (const auto& [len, count] : dist.histogram) {
        if (len < lo || len > hi || len == 0 || count == 0) continue;
        xs.push_back(std::log10(static_cast<double>(len)));
        ys.push_back(std::log10(static_cast<double>(count)));
    }
    dist.fit.points = xs.size();
    if (xs.size() < 3) {
        dist.fit.reason = "degenerate length range";
        return dist;
    }
    double min_x = *std::min_element(xs.begin(), xs.end());
    double max_x = *std::max_element(xs.begin(), xs.end());
    if (max_x - min_x < 1e-12) {
        dist.fit.reason = "degenerate length range";
        return dist;
    }

    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    dist.fit.slope = (n * sxy - sx * sy) / denom;
    dist.fit.intercept = (sy - dist.fit.slope * sx) / n;

    double mean_y = sy / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double pred = dist.fit.intercept + dist.fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    if (ss_tot < 1e-12) {
        dist.fit.reason = "degenerate counts";
        return dist;
    }
    dist.fit.r2 = 1.0 - ss_res / ss_tot;
    dist.fit.fitted = true;
    return dist;
}

LengthDistribution length_distribution(const std::vector<CodeSnippet>& corpus) {
    std::vector<std::uint64_t> lengths;
    lengths.reserve(corpus.size());
    for (const auto& s : corpus) {
        try {
            auto fs = frontend::extract_features(frontend::parse(s));
            if (!fs.empty()) lengths.push_back(fs.size());
        } catch (const ParseError&) {
            log_warn("length_distribution: skipping unparseable snippet " + s.id);
        }
    }
    if (lengths.size() < 100) {
        throw InsufficientData("length_distribution needs >= 100 snippets, got " +
                               std::to_string(lengths.size()));
    }
    return length_distribution_from_lengths(lengths);
}

std::string histogram_csv(const LengthDistribution& dist) {
    std::string csv = "# power_law slope=" + std::to_string(dist.fit.slope) +
                      " intercept=" + std::to_string(dist.fit.intercept) +
                      " r2=" + std::to_string(dist.fit.r2) +
                      " fitted=" + (dist.fit.fitted ? "true" : "false") +
                      " samples=" + std::to_string(dist.sample_size);
    if (!dist.fit.fitted) csv += " reason=\"" + dist.fit.reason + "\"";
    csv += "\nlength,count\n";
    for (const auto& [len, count] : dist.histogram) {
        csv += std::to_string(len) + ',' + std::to_string(count) + '\n';
    }
    return csv;
}

ConcisenessDiversityReport conciseness_diversity(const std::vector<QueryResultSet>& results,
                                                 const index::LshIndex& index) {
    ConcisenessDiversityReport report;
    std::vector<double> ratios;
    double jaccard_sum = 0.0;
    double containment_sum = 0.0;

    auto record_ids = [&](const std::string& id) -> const index::StoredRecord* {
        auto it = index.record_index_by_id.find(id);
        return it == index.record_index_by_id.end() ? nullptr : &index.records[it->second];
    };

    for (const auto& q : results) {
        std::vector<const index::StoredRecord*> recs;
        for (const auto& id : q.result_ids) {
            if (const auto* r = record_ids(id)) recs.push_back(r);
        }
        if (recs.empty()) continue;
        ++report.queries;
        if (q.query_feature_count > 0) {
            for (const auto* r : recs) {
                ratios.push_back(static_cast<double>(r->full.size()) /
                                 static_cast<double>(q.query_feature_count));
            }
        }
        if (recs.size() < 2) continue;
        ++report.pair_queries;

        double pair_jaccard = 0.0;
        double pair_containment = 0.0;
        std::size_t unordered_pairs = 0;
        std::size_t ordered_pairs = 0;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            for (std::size_t j = i + 1; j < recs.size(); ++j) {
                std::uint64_t inter = 0;
                auto a = recs[i]->full.begin();
                auto b = recs[j]->full.begin();
                while (a != recs[i]->full.end() && b != recs[j]->full.end()) {
                    if (a->first < b->first) ++a;
                    else if (b->first < a->first) ++b;
                    else { ++inter; ++a; ++b; }
                }
                std::uint64_t size_i = recs[i]->full.size();
                std::uint64_t size_j = recs[j]->full.size();
                std::uint64_t uni = size_i + size_j - inter;
                pair_jaccard += uni ? static_cast<double>(inter) / static_cast<double>(uni)
                                    : 0.0;
                ++unordered_pairs;
                pair_containment += size_i ? static_cast<double>(inter) / size_i : 0.0;
                pair_containment += size_j ? static_cast<double>(inter) / size_j : 0.0;
                ordered_pairs += 2;
            }
        }
        jaccard_sum += pair_jaccard / static_cast<double>(unordered_pairs);
        containment_sum += pair_containment / static_cast<double>(ordered_pairs);
    }

    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        double sum = 0.0;
        for (double r : ratios) sum += r;
        report.mean_length_ratio = sum / static_cast<double>(ratios.size());
        report.median_length_ratio = ratios[ratios.size() / 2];
    }
    if (report.pair_queries > 0) {
        report.mean_pairwise_jaccard = jaccard_sum / static_cast<double>(report.pair_queries);
        report.mean_pairwise_containment =
            containment_sum / static_cast<double>(report.pair_queries);
    }
    return report;
}

std::string conciseness_json(const ConcisenessDiversityReport& report) {
    json j;
    j["queries"] = report.queries;
    j["pair_queries"] = report.pair_queries;
    j["mean_length_ratio"] = report.mean_length_ratio;
    j["median_length_ratio"] = report.median_length_ratio;
    j["mean_pairwise_jaccard"] = report.mean_pairwise_jaccard;
    j["mean_pairwise_containment"] = report.mean_pairwise_containment;
    return j.dump(2);
}

BenchReport scalability_bench(const std::vector<std::size_t>& corpus_sizes,
                              const BenchOptions& opts) {
    BenchReport report;
    synth::PowerLawOptions gen;

    // One query pool: lengths fixed across corpus sizes so the quartile
    // composition stays comparable; tokens are drawn from each size's pool.
    auto query_lengths = synth::sample_power_law_lengths(opts.query_pool, opts.seed ^ 0xabcdULL);

    // Quartile assignment by feature length rank within the pool.
    std::vector<std::size_t> order(query_lengths.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return query_lengths[a] < query_lengths[b];
    });
    std::vector<int> quartile(query_lengths.size(), 1);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        quartile[order[rank]] = static_cast<int>(rank * 4 / order.size()) + 1;
    }

    for (std::size_t size : corpus_sizes) {
        auto corpus = synth::power_law_corpus(size, opts.seed, gen);
        synth::PowerLawOptions qgen = gen;
        qgen.id_prefix = "qry";
        auto queries = synth::fixed_length_snippets(
            query_lengths, synth::default_pool(size, gen), opts.seed ^ 0x51ULL, qgen);

        VectorCorpusReader reader(std::move(corpus));
        index::BuildOptions build;
        build.lsh = opts.lsh;
        build.selection = opts.selection;
        build.threads = opts.threads;
        auto idx = index::build_index(reader, build);

        // Untimed warmup: the first post-build query pays one-time allocator
        // costs that would otherwise distort the per-query means.
        for (std::size_t w = 0; w < 2 && w < queries.size(); ++w) {
            search::query(idx, queries[w], {});
        }

        struct Acc {
            double candidates = 0, lsh_us = 0, scan_us = 0;
            std::size_t n = 0;
        };
        Acc per_quartile[5];  // [0] aggregate, [1..4] quartiles

        search::QueryOptions lsh_opts;
        lsh_opts.top_n = opts.top_n;
        search::QueryOptions scan_opts = lsh_opts;
        scan_opts.force_full_scan = true;

        for (std::size_t qi = 0; qi < queries.size(); ++qi) {
            auto lsh_resp = search::query(idx, queries[qi], lsh_opts);
            auto scan_resp = search::query(idx, queries[qi], scan_opts);
            double lsh_us = static_cast<double>(lsh_resp.timings.featurize_us +
                                                lsh_resp.timings.probe_us +
                                                lsh_resp.timings.rerank_us);
            double scan_us = static_cast<double>(scan_resp.timings.featurize_us +
                                                 scan_resp.timings.probe_us +
                                                 scan_resp.timings.rerank_us);
            for (int q : {0, quartile[qi]}) {
                per_quartile[q].candidates += static_cast<double>(lsh_resp.candidate_count);
                per_quartile[q].lsh_us += lsh_us;
                per_quartile[q].scan_us += scan_us;
                ++per_quartile[q].n;
            }
        }

        for (int q = 0; q <= 4; ++q) {
            if (per_quartile[q].n == 0) continue;
            BenchPoint p;
            p.corpus_size = idx.records.size();
            p.quartile = q;
            p.queries = per_quartile[q].n;
            double n = static_cast<double>(per_quartile[q].n);
            p.mean_candidates = per_quartile[q].candidates / n;
            p.mean_lsh_us = per_quartile[q].lsh_us / n;
            p.mean_scan_us = per_quartile[q].scan_us / n;
            p.scan_comparisons = idx.records.size();
            if (q == 0) report.per_size.push_back(p);
            else report.points.push_back(p);
        }
        log_info("bench size " + std::to_string(idx.records.size()) + ": mean candidates " +
                 std::to_string(report.per_size.back().mean_candidates));
    }
    return report;
}

std::string bench_csv(const BenchReport& report) {
    std::string csv =
        "corpus_size,quartile,queries,mean_candidates,mean_lsh_us,mean_scan_us,"
        "scan_comparisons\n";
    auto row = [&csv](const BenchPoint& p) {
        csv += std::to_string(p.corpus_size) + ',' + std::to_string(p.quartile) + ',' +
               std::to_string(p.queries) + ',' + std::to_string(p.mean_candidates) + ',' +
               std::to_string(p.mean_lsh_us) + ',' + std::to_string(p.mean_scan_us) + ',' +
               std::to_string(p.scan_comparisons) + '\n';
    };
    for (const auto& p : report.per_size) row(p);
    for (const auto& p : report.points) row(p);
    return csv;
}

} // namespace senatus::eval
