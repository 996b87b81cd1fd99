#include "senatus/minhash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "senatus/errors.hpp"
#include "senatus/fingerprint.hpp"

namespace senatus::sketch {

HashFamily::HashFamily(std::uint32_t count, std::uint64_t seed) : seed_(seed) {
    mul_.reserve(count);
    add_.reserve(count);
    std::uint64_t state = seed ^ 0x5851f42d4c957f2dULL;
    for (std::uint32_t i = 0; i < count; ++i) {
        mul_.push_back(splitmix64(state) | 1ULL);  // odd multiplier
        add_.push_back(splitmix64(state));
    }
}

std::vector<std::uint64_t> feature_ids(const frontend::FeatureSet& features) {
    std::vector<std::uint64_t> ids;
    ids.reserve(features.terms.size());
    for (const auto& [term, count] : features.terms) {
        ids.push_back(term_fingerprint(term));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::string pad_sentinel(const std::string& record_id, std::uint32_t k) {
    return std::string(1, '\x01') + "pad\x01" + record_id + '\x01' + std::to_string(k);
}

frontend::FeatureSet pad(const frontend::FeatureSet& features, std::uint32_t maxlength,
                         const std::string& record_id) {
    if (features.size() > maxlength) throw OversizeInput(features.size(), maxlength);
    frontend::FeatureSet out = features;
    std::uint32_t k = 0;
    while (out.terms.size() < maxlength) {
        out.terms.emplace(pad_sentinel(record_id, k++), 1u);
    }
    return out;
}

MinHashSignature minhash(const std::vector<std::uint64_t>& ids, const HashFamily& family,
                         const LshParams& params) {
    if (ids.empty()) throw EmptyFeatureSet();
    MinHashSignature sig;
    sig.seed = params.seed;
    std::uint32_t slots = params.signature_length();
    sig.values.assign(slots, std::numeric_limits<std::uint64_t>::max());
    for (std::uint64_t id : ids) {
        for (std::uint32_t i = 0; i < slots; ++i) {
            std::uint64_t h = family.apply(i, id);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

MinHashSignature minhash(const frontend::FeatureSet& features, const LshParams& params) {
    HashFamily family(params.signature_length(), params.seed);
    return minhash(feature_ids(features), family, params);
}

std::vector<BandKey> band_keys(const MinHashSignature& sig, const LshParams& params) {
    std::vector<BandKey> keys;
    keys.reserve(params.bands);
    for (std::uint32_t b = 0; b < params.bands; ++b) {
        std::uint64_t digest = kFnvOffset;
        for (std::uint32_t r = 0; r < params.rows; ++r) {
            digest = fnv1a64_u64(sig.values[b * params.rows + r], digest);
        }
        keys.push_back(BandKey{b, digest});
    }
    return keys;
}

double lsh_threshold(std::uint32_t bands, std::uint32_t rows) {
    return std::pow(1.0 / static_cast<double>(bands), 1.0 / static_cast<double>(rows));
}

double collision_probability(double s, std::uint32_t bands, std::uint32_t rows) {
    return 1.0 - std::pow(1.0 - std::pow(s, static_cast<double>(rows)),
                          static_cast<double>(bands));
}

} // namespace senatus::sketch
