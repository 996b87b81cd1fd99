#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "senatus/errors.hpp"
#include "senatus/minhash.hpp"
#include "testutil.hpp"

using namespace senatus;
using namespace senatus::sketch;
using senatus::frontend::FeatureSet;

namespace {

FeatureSet make_set(const std::vector<std::string>& terms, const std::string& id = "s") {
    FeatureSet fs;
    fs.source_id = id;
    for (const auto& t : terms) ++fs.terms[t];
    return fs;
}

// Set-arithmetic Jaccard oracle over term strings.
double jaccard_oracle(const FeatureSet& a, const FeatureSet& b) {
    std::set<std::string> u, i;
    for (const auto& [t, c] : a.terms) u.insert(t);
    for (const auto& [t, c] : b.terms) u.insert(t);
    for (const auto& [t, c] : a.terms) {
        if (b.terms.count(t)) i.insert(t);
    }
    return u.empty() ? 0.0 : static_cast<double>(i.size()) / static_cast<double>(u.size());
}

// Two random sets with exactly the planted Jaccard similarity.
std::pair<FeatureSet, FeatureSet> planted_pair(double s, std::size_t universe,
                                               std::uint64_t& state) {
    // |A| = |B| = u, |A n B| = z, |A u B| = 2u - z, J = z / (2u - z)
    // choose z = round(2u*s / (1+s))
    auto z = static_cast<std::size_t>(std::llround(2.0 * universe * s / (1.0 + s)));
    FeatureSet a, b;
    std::uint64_t tag = testutil::rng_next(state);
    for (std::size_t i = 0; i < z; ++i) {
        std::string t = "c" + std::to_string(tag) + "_" + std::to_string(i);
        a.terms[t] = 1;
        b.terms[t] = 1;
    }
    for (std::size_t i = z; i < universe; ++i) {
        a.terms["a" + std::to_string(tag) + "_" + std::to_string(i)] = 1;
        b.terms["b" + std::to_string(tag) + "_" + std::to_string(i)] = 1;
    }
    return {a, b};
}

double slot_match_fraction(const MinHashSignature& x, const MinHashSignature& y) {
    std::size_t eq = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        if (x.values[i] == y.values[i]) ++eq;
    }
    return static_cast<double>(eq) / static_cast<double>(x.values.size());
}

} // namespace

TEST_CASE("pad is the identity at maxlength") {
    auto fs = make_set({"a", "b", "c"});
    auto padded = pad(fs, 3, "rec");
    CHECK(padded.terms == fs.terms);
}

TEST_CASE("pad fills empty sets with record-unique sentinels") {
    FeatureSet empty_a, empty_b;
    auto pa = pad(empty_a, 100, "recA");
    auto pb = pad(empty_b, 100, "recB");
    CHECK(pa.terms.size() == 100);
    CHECK(pb.terms.size() == 100);
    CHECK(jaccard_oracle(pa, pb) == doctest::Approx(0.0));
}

TEST_CASE("padded Jaccard of identical 60-term records is 60/140") {
    std::vector<std::string> shared;
    for (int i = 0; i < 60; ++i) shared.push_back("t" + std::to_string(i));
    auto a = pad(make_set(shared), 100, "recA");
    auto b = pad(make_set(shared), 100, "recB");
    CHECK(jaccard_oracle(a, b) == doctest::Approx(60.0 / 140.0));
}

TEST_CASE("pad rejects oversize inputs") {
    auto fs = make_set({"a", "b", "c", "d"});
    CHECK_THROWS_AS(pad(fs, 3, "rec"), OversizeInput);
}

TEST_CASE("padding never inflates similarity") {
    std::uint64_t state = 23;
    for (int trial = 0; trial < 40; ++trial) {
        FeatureSet a, b;
        std::size_t na = 1 + testutil::rng_below(state, 60);
        std::size_t nb = 1 + testutil::rng_below(state, 60);
        for (std::size_t i = 0; i < na; ++i) {
            a.terms["t" + std::to_string(testutil::rng_below(state, 80))] = 1;
        }
        for (std::size_t i = 0; i < nb; ++i) {
            b.terms["t" + std::to_string(testutil::rng_below(state, 80))] = 1;
        }
        std::size_t inter = 0;
        for (const auto& [t, c] : a.terms) inter += b.terms.count(t);
        double normalized_overlap =
            static_cast<double>(inter) /
            static_cast<double>(std::max(a.terms.size(), b.terms.size()));
        auto pa = pad(a, 100, "ra" + std::to_string(trial));
        auto pb = pad(b, 100, "rb" + std::to_string(trial));
        CHECK(jaccard_oracle(pa, pb) <= normalized_overlap + 1e-12);
    }
}

TEST_CASE("minhash is deterministic and order-invariant") {
    LshParams params;
    params.bands = 10;
    params.rows = 4;
    params.seed = 99;
    auto a = make_set({"x", "y", "z", "w"});
    auto b = make_set({"w", "z", "y", "x"});
    auto sig_a = minhash(a, params);
    auto sig_b = minhash(b, params);
    CHECK(sig_a.values == sig_b.values);
    CHECK(sig_a.values.size() == params.signature_length());
    CHECK_THROWS_AS(minhash(FeatureSet{}, params), EmptyFeatureSet);
}

TEST_CASE("signature size is bands*rows regardless of input size") {
    LshParams params;
    params.bands = 50;
    params.rows = 2;
    std::uint64_t state = 5;
    for (std::size_t n : {1u, 10u, 500u}) {
        FeatureSet fs;
        for (std::size_t i = 0; i < n; ++i) {
            fs.terms["t" + std::to_string(testutil::rng_next(state))] = 1;
        }
        CHECK(minhash(fs, params).values.size() == 100);
    }
}

TEST_CASE("disjoint sets rarely collide per slot") {
    LshParams params;
    params.bands = 250;
    params.rows = 4;  // 1000 slots
    params.seed = 4242;
    std::uint64_t state = 31;
    double total = 0.0;
    int trials = 40;
    for (int t = 0; t < trials; ++t) {
        auto [a, b] = planted_pair(0.0, 200, state);
        total += slot_match_fraction(minhash(a, params), minhash(b, params));
    }
    CHECK(total / trials <= 0.02);
}

TEST_CASE("per-slot collision rate approximates planted Jaccard 0.5") {
    LshParams params;
    params.bands = 250;
    params.rows = 4;  // 1000 slots
    params.seed = 777;
    std::uint64_t state = 37;
    double total = 0.0;
    int trials = 60;
    for (int t = 0; t < trials; ++t) {
        auto [a, b] = planted_pair(0.5, 200, state);
        CHECK(jaccard_oracle(a, b) == doctest::Approx(0.5).epsilon(0.01));
        total += slot_match_fraction(minhash(a, params), minhash(b, params));
    }
    CHECK(total / trials == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("band keys digest R-slot chunks") {
    LshParams params;
    params.bands = 4;
    params.rows = 2;
    params.seed = 1;

    MinHashSignature sig;
    sig.values = {1, 2, 3, 4, 5, 6, 7, 8};
    auto keys = band_keys(sig, params);
    REQUIRE(keys.size() == 4);
    for (std::uint32_t b = 0; b < 4; ++b) CHECK(keys[b].band_index == b);

    SUBCASE("single band covers the whole signature") {
        LshParams whole;
        whole.bands = 1;
        whole.rows = 8;
        CHECK(band_keys(sig, whole).size() == 1);
    }
    SUBCASE("identical signatures produce identical keys") {
        auto again = band_keys(sig, params);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            CHECK(keys[i].digest == again[i].digest);
        }
    }
    SUBCASE("a change in slot 0 only touches band 0") {
        MinHashSignature other = sig;
        other.values[0] = 99;
        auto other_keys = band_keys(other, params);
        CHECK(other_keys[0].digest != keys[0].digest);
        for (std::size_t b = 1; b < 4; ++b) {
            CHECK(other_keys[b].digest == keys[b].digest);
        }
    }
}

TEST_CASE("approximate threshold matches the banding formula") {
    CHECK(lsh_threshold(50, 2) == doctest::Approx(0.1414).epsilon(0.001));
    CHECK(lsh_threshold(10, 1) == doctest::Approx(0.1000));
    CHECK(lsh_threshold(1, 1) == doctest::Approx(1.0));
    CHECK(lsh_threshold(100, 2) == doctest::Approx(0.1000));
}

TEST_CASE("collision probability endpoints and reference values") {
    CHECK(collision_probability(0.0, 50, 2) == doctest::Approx(0.0));
    CHECK(collision_probability(1.0, 50, 2) == doctest::Approx(1.0));
    CHECK(collision_probability(0.1414, 50, 2) == doctest::Approx(0.636).epsilon(0.002));
    CHECK(collision_probability(0.5, 50, 2) ==
          doctest::Approx(1.0 - std::pow(0.75, 50.0)));
}

TEST_CASE("banding collision rate follows 1-(1-s^R)^B") {
    LshParams params;
    params.bands = 50;
    params.rows = 2;
    params.seed = 31337;
    std::uint64_t state = 41;
    for (double s : {0.1, 0.3, 0.5}) {
        int collisions = 0;
        int trials = 300;
        for (int t = 0; t < trials; ++t) {
            auto [a, b] = planted_pair(s, 120, state);
            auto ka = band_keys(minhash(a, params), params);
            auto kb = band_keys(minhash(b, params), params);
            bool hit = false;
            for (std::size_t i = 0; i < ka.size() && !hit; ++i) {
                hit = ka[i].digest == kb[i].digest;
            }
            collisions += hit ? 1 : 0;
        }
        double expected = collision_probability(s, params.bands, params.rows);
        CHECK(static_cast<double>(collisions) / trials ==
              doctest::Approx(expected).epsilon(0.12));
    }
}
