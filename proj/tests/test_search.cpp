#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "senatus/errors.hpp"
#include "senatus/index.hpp"
#include "senatus/parser.hpp"
#include "senatus/search.hpp"
#include "senatus/synthetic.hpp"
#include "testutil.hpp"

using namespace senatus;
using namespace senatus::search;
using senatus::frontend::FeatureSet;

namespace {

FeatureSet make_set(const std::vector<std::string>& terms) {
    FeatureSet fs;
    for (const auto& t : terms) ++fs.terms[t];
    return fs;
}

index::LshIndex build_from(std::vector<CodeSnippet> snippets,
                           index::BuildOptions opts = {}) {
    VectorCorpusReader reader(std::move(snippets));
    return index::build_index(reader, opts);
}

// Brute-force rerank oracle over stored full vectors, mirroring the
// containment/jaccard definitions on term-id sets.
std::vector<QueryResult> oracle_rerank(const index::LshIndex& idx,
                                       const FeatureSet& query, Rerank rerank,
                                       std::uint32_t top_n) {
    std::vector<std::uint32_t> qids;
    for (const auto& [term, count] : query.terms) {
        if (auto id = idx.term_id(term)) qids.push_back(*id);
    }
    std::sort(qids.begin(), qids.end());
    double qsize = static_cast<double>(query.terms.size());

    std::vector<QueryResult> all;
    for (const auto& rec : idx.records) {
        std::set<std::uint32_t> rec_ids;
        for (const auto& [id, count] : rec.full) rec_ids.insert(id);
        std::uint32_t dot = 0;
        for (std::uint32_t id : qids) dot += rec_ids.count(id);
        QueryResult r;
        r.id = rec.id;
        r.dot = dot;
        r.containment = qsize > 0 ? dot / qsize : 0.0;
        double uni = qsize + static_cast<double>(rec_ids.size()) - dot;
        r.jaccard = uni > 0 ? dot / uni : 0.0;
        all.push_back(r);
    }
    auto key = [rerank](const QueryResult& r) {
        switch (rerank) {
            case Rerank::kContainment: return r.containment;
            case Rerank::kJaccard: return r.jaccard;
            case Rerank::kDot: return static_cast<double>(r.dot);
        }
        return 0.0;
    };
    std::sort(all.begin(), all.end(), [&](const QueryResult& a, const QueryResult& b) {
        if (key(a) != key(b)) return key(a) > key(b);
        return a.id < b.id;
    });
    if (all.size() > top_n) all.resize(top_n);
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i].rank = static_cast<std::uint32_t>(i) + 1;
    }
    return all;
}

} // namespace

TEST_CASE("containment examples") {
    auto q = make_set({"a", "b"});
    CHECK(containment(q, make_set({"a", "b", "c", "d"})) == doctest::Approx(1.0));
    CHECK(containment(q, make_set({"b", "c"})) == doctest::Approx(0.5));
    CHECK(containment(q, make_set({"x", "y"})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(containment(FeatureSet{}, q), EmptyQuery);
}

TEST_CASE("jaccard examples") {
    auto q = make_set({"a", "b"});
    CHECK(jaccard(q, q) == doctest::Approx(1.0));
    CHECK(jaccard(q, make_set({"b", "c"})) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(jaccard(FeatureSet{}, FeatureSet{}), BothEmpty);
}

TEST_CASE("jaccard penalizes long candidates that containment rewards") {
    std::vector<std::string> small{"a", "b"};
    std::vector<std::string> big = small;
    for (int i = 0; i < 98; ++i) big.push_back("fresh" + std::to_string(i));
    auto q = make_set(small);
    auto m = make_set(big);
    CHECK(containment(q, m) == doctest::Approx(1.0));
    CHECK(jaccard(q, m) == doctest::Approx(2.0 / 100.0));
}

TEST_CASE("self-retrieval ranks first with jaccard 1.0") {
    auto corpus = synth::power_law_corpus(200, 42);
    auto target = corpus[17];
    auto idx = build_from(corpus);
    auto resp = query(idx, target);
    REQUIRE(!resp.results.empty());
    CHECK(resp.results[0].id == target.id);
    CHECK(resp.results[0].jaccard == doctest::Approx(1.0));
    CHECK(resp.results[0].containment == doctest::Approx(1.0));
}

TEST_CASE("disjoint queries draw almost no candidates") {
    auto idx = build_from(synth::power_law_corpus(1000, 77));
    // tokens from a foreign namespace: zero term overlap with the corpus
    synth::PowerLawOptions foreign;
    foreign.token_prefix = "foreign";
    foreign.id_prefix = "fq";
    auto queries = synth::power_law_corpus(100, 123, foreign);
    double total_candidates = 0;
    for (const auto& q : queries) {
        total_candidates += static_cast<double>(query(idx, q).candidate_count);
    }
    double mean = total_candidates / 100.0;
    CHECK(mean < 0.01 * static_cast<double>(idx.records.size()));
}

TEST_CASE("full-scan query equals the brute-force rerank oracle exactly") {
    auto corpus = synth::power_law_corpus(300, 5);
    auto idx = build_from(corpus);
    auto probes = synth::power_law_corpus(10, 501);
    for (const auto& probe : probes) {
        auto features = frontend::extract_features(frontend::parse(probe));
        for (Rerank rerank : {Rerank::kContainment, Rerank::kJaccard, Rerank::kDot}) {
            QueryOptions opts;
            opts.force_full_scan = true;
            opts.rerank = rerank;
            opts.top_n = 25;
            auto resp = query(idx, probe, opts);
            auto expected = oracle_rerank(idx, features, rerank, 25);
            REQUIRE(resp.results.size() == expected.size());
            CHECK(resp.candidate_count == idx.records.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(resp.results[i].id == expected[i].id);
                CHECK(resp.results[i].dot == expected[i].dot);
                CHECK(resp.results[i].containment == expected[i].containment);
                CHECK(resp.results[i].jaccard == expected[i].jaccard);
                CHECK(resp.results[i].rank == expected[i].rank);
            }
        }
    }
}

TEST_CASE("dot and containment rerank produce identical orderings") {
    auto idx = build_from(synth::power_law_corpus(400, 13));
    auto probes = synth::power_law_corpus(10, 301);
    for (const auto& probe : probes) {
        QueryOptions a, b;
        a.rerank = Rerank::kDot;
        b.rerank = Rerank::kContainment;
        a.force_full_scan = b.force_full_scan = true;
        auto ra = query(idx, probe, a);
        auto rb = query(idx, probe, b);
        REQUIRE(ra.results.size() == rb.results.size());
        for (std::size_t i = 0; i < ra.results.size(); ++i) {
            CHECK(ra.results[i].id == rb.results[i].id);
        }
    }
}

TEST_CASE("candidate probability tracks the banding formula across seeds") {
    // Plant a query/record pair with a known padded-selected Jaccard and
    // measure the collision rate over many hash-family seeds. Eight
    // statements featurize to 31 distinct terms; padding the record to 100
    // puts the pair mid-curve (s = 0.31).
    std::string text;
    for (int i = 0; i < 8; ++i) text += "tok" + std::to_string(i) + ";\n";

    CodeSnippet record{"rec", "mini", text, std::nullopt};
    CodeSnippet probe{"probe", "mini", text, std::nullopt};

    // planted similarity: query features equal the record's selected set,
    // which is padded, so s = |F| / maxlength
    auto features = frontend::extract_features(frontend::parse(probe));
    double expected_s = static_cast<double>(features.size()) / 100.0;

    int hits = 0;
    const int trials = 2500;
    for (int seed = 0; seed < trials; ++seed) {
        index::BuildOptions opts;
        opts.lsh.seed = static_cast<std::uint64_t>(seed) + 1;
        opts.lsh.bands = 8;
        opts.lsh.rows = 2;
        opts.selection.k = 100;
        auto idx = build_from({record}, opts);
        REQUIRE(idx.records.size() == 1);
        auto resp = query(idx, probe, {});
        hits += resp.candidate_count > 0 ? 1 : 0;
    }
    double expected = sketch::collision_probability(expected_s, 8, 2);
    double observed = static_cast<double>(hits) / trials;
    CHECK(std::abs(observed - expected) <= 0.03);
}

TEST_CASE("query response invariants") {
    auto idx = build_from(synth::power_law_corpus(300, 19));
    auto probes = synth::power_law_corpus(5, 881);
    for (const auto& probe : probes) {
        auto resp = query(idx, probe);
        CHECK(resp.results.size() <= 100);
        for (std::size_t i = 0; i < resp.results.size(); ++i) {
            CHECK(resp.results[i].rank == i + 1);
            CHECK(resp.results[i].containment >= 0.0);
            CHECK(resp.results[i].containment <= 1.0);
            CHECK(resp.results[i].jaccard >= 0.0);
            CHECK(resp.results[i].jaccard <= 1.0);
            if (i > 0) {
                CHECK(resp.results[i - 1].containment >= resp.results[i].containment);
            }
        }
        CHECK(resp.candidate_count >= resp.results.size());
    }
}

TEST_CASE("empty queries are rejected") {
    auto idx = build_from(synth::power_law_corpus(10, 1));
    CHECK_THROWS_AS(query_features(idx, FeatureSet{}, nullptr, {}), EmptyQuery);
}

TEST_CASE("query json carries the contract fields") {
    auto idx = build_from(synth::power_law_corpus(50, 3));
    auto probe = synth::power_law_corpus(1, 404)[0];
    auto resp = query(idx, probe);
    auto json_text = response_json(resp, probe.id);
    for (const char* field : {"\"query_id\"", "\"results\"", "\"candidate_count\"",
                              "\"timings_us\"", "\"degraded\"", "\"featurize\"",
                              "\"probe\"", "\"rerank\""}) {
        CAPTURE(field);
        CHECK(json_text.find(field) != std::string::npos);
    }
}
