// minhash.hpp - MinHash signatures, asymmetric padding, banded LSH keys
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "senatus/features.hpp"

namespace senatus::sketch {

struct LshParams {
    std::uint32_t bands = 50;      // B
    std::uint32_t rows = 2;        // R
    std::uint64_t seed = 42;
    std::uint32_t maxlength = 100; // padding target; defaults to the selection cap K

    std::uint32_t signature_length() const { return bands * rows; }
};

struct MinHashSignature {
    std::vector<std::uint64_t> values;  // length = B x R
    std::uint64_t seed = 0;
};

struct BandKey {
    std::uint32_t band_index = 0;
    std::uint64_t digest = 0;

    bool operator==(const BandKey& other) const {
        return band_index == other.band_index && digest == other.digest;
    }
};

// B x R independent hash functions derived deterministically from the seed
// (odd-multiplier multiply-add over 64-bit term fingerprints). Built once per
// index; thread-safe to share.
class HashFamily {
public:
    HashFamily(std::uint32_t count, std::uint64_t seed);

    std::uint64_t apply(std::uint32_t i, std::uint64_t x) const {
        return mul_[i] * x + add_[i];
    }
    std::uint32_t size() const { return static_cast<std::uint32_t>(mul_.size()); }
    std::uint64_t seed() const { return seed_; }

private:
    std::vector<std::uint64_t> mul_;
    std::vector<std::uint64_t> add_;
    std::uint64_t seed_ = 0;
};

// Stable fingerprints of a feature set's distinct terms (sorted, deduplicated).
std::vector<std::uint64_t> feature_ids(const frontend::FeatureSet& features);

// Pads a corpus record's feature set to exactly maxlength distinct elements
// with record-unique sentinels. Never applied to queries. Throws OversizeInput
// when the input exceeds maxlength.
frontend::FeatureSet pad(const frontend::FeatureSet& features, std::uint32_t maxlength,
                         const std::string& record_id);

// Sentinel term for padding slot k of a record. Contains a control byte, so it
// can never collide with a real term (token texts are control-char free).
std::string pad_sentinel(const std::string& record_id, std::uint32_t k);

// MinHash signature over the distinct terms. Throws EmptyFeatureSet.
MinHashSignature minhash(const frontend::FeatureSet& features, const LshParams& params);
MinHashSignature minhash(const std::vector<std::uint64_t>& ids, const HashFamily& family,
                         const LshParams& params);

// One key per band; key j digests signature slots [j*R, (j+1)*R).
std::vector<BandKey> band_keys(const MinHashSignature& sig, const LshParams& params);

// Approximate similarity threshold of a (B, R) banding: (1/B)^(1/R).
double lsh_threshold(std::uint32_t bands, std::uint32_t rows);

// Probability that two sets with Jaccard similarity s share at least one
// band: 1 - (1 - s^R)^B.
double collision_probability(double s, std::uint32_t bands, std::uint32_t rows);

} // namespace senatus::sketch
