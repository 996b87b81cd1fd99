#include "senatus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "senatus/fingerprint.hpp"

namespace senatus::synth {

namespace {

double unit_double(std::uint64_t& state) {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::uint64_t bounded(std::uint64_t& state, std::uint64_t n) {
    return splitmix64(state) % n;
}

} // namespace

ZipfSampler::ZipfSampler(std::size_t n, double alpha) : ZipfSampler(1, n, alpha) {}

ZipfSampler::ZipfSampler(std::size_t lo, std::size_t hi, double alpha) : lo_(lo) {
    cdf_.reserve(hi - lo + 1);
    double total = 0.0;
    for (std::size_t v = lo; v <= hi; ++v) {
        total += std::pow(static_cast<double>(v), -alpha);
        cdf_.push_back(total);
    }
    for (double& c : cdf_) c /= total;
}

std::size_t ZipfSampler::sample(std::uint64_t& rng_state) const {
    double u = unit_double(rng_state);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return lo_ + static_cast<std::size_t>(it - cdf_.begin());
}

namespace {

// Draws `count` distinct tokens; falls back to a linear pool walk so it
// always terminates.
void draw_distinct(std::vector<std::string>& out, std::size_t count,
                   const std::function<std::string(std::uint64_t&)>& draw,
                   std::uint64_t& state, std::size_t pool_hint) {
    std::unordered_set<std::string> seen(out.begin(), out.end());
    std::size_t attempts = 0;
    std::size_t limit = 20 * count + 64;
    while (out.size() < count && attempts < limit) {
        ++attempts;
        std::string tok = draw(state);
        if (seen.insert(tok).second) out.push_back(std::move(tok));
    }
    std::size_t serial = 0;
    while (out.size() < count) {  // exhaust-proof fallback
        std::string tok = "fb" + std::to_string(pool_hint) + "_" + std::to_string(serial++);
        if (seen.insert(tok).second) out.push_back(std::move(tok));
    }
}

std::string statements_text(const std::vector<std::string>& tokens) {
    std::string text;
    for (const auto& t : tokens) {
        text += t;
        text += ";\n";
    }
    return text;
}

} // namespace

std::size_t default_pool(std::size_t n, const PowerLawOptions& opts) {
    return std::max<std::size_t>(
        opts.pool_min, static_cast<std::size_t>(static_cast<double>(n) * opts.pool_factor));
}

std::vector<std::size_t> sample_power_law_lengths(std::size_t count, std::uint64_t seed,
                                                  const PowerLawOptions& opts) {
    ZipfSampler length(opts.min_len, opts.max_len, opts.alpha);
    std::uint64_t state = seed ^ 0x2545f491ULL;
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(length.sample(state));
    return out;
}

std::vector<CodeSnippet> fixed_length_snippets(const std::vector<std::size_t>& lengths,
                                               std::size_t pool, std::uint64_t seed,
                                               const PowerLawOptions& opts) {
    ZipfSampler popularity(pool, opts.pool_alpha);
    std::uint64_t state = seed ^ 0x9d2c5680ULL;
    std::vector<CodeSnippet> out;
    out.reserve(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        std::vector<std::string> tokens;
        tokens.reserve(lengths[i]);
        draw_distinct(
            tokens, lengths[i],
            [&](std::uint64_t& s) {
                return opts.token_prefix + "t" + std::to_string(popularity.sample(s));
            },
            state, i);
        CodeSnippet s;
        s.id = opts.id_prefix + std::to_string(i);
        s.language = opts.language;
        s.text = statements_text(tokens);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CodeSnippet> power_law_corpus(std::size_t n, std::uint64_t seed,
                                          const PowerLawOptions& opts) {
    auto lengths = sample_power_law_lengths(n, seed, opts);
    return fixed_length_snippets(lengths, default_pool(n, opts), seed, opts);
}

ClusteredCorpus clustered_corpus(std::uint64_t seed, const ClusterOptions& opts) {
    std::uint64_t state = seed ^ 0xb5297a4dULL;
    ZipfSampler common_pop(opts.common_pool, 1.0);
    ZipfSampler mid_pop(opts.mid_pool, 0.8);
    ZipfSampler phrase_pop(opts.phrase_pool, opts.phrase_alpha);
    ZipfSampler noise_len(opts.noise_min, opts.noise_max, opts.noise_alpha);
    ZipfSampler phrase_len(opts.phrase_len_min, opts.phrase_len_max, 1.0);

    // Idiom pool: shared token n-grams, so noise features recur corpus-wide
    // instead of being one-off.
    std::vector<std::vector<std::string>> phrases(opts.phrase_pool);
    for (auto& phrase : phrases) {
        std::size_t len = phrase_len.sample(state);
        for (std::size_t i = 0; i < len; ++i) {
            if (unit_double(state) < opts.common_prob) {
                phrase.push_back(opts.id_prefix + "cm" + std::to_string(common_pop.sample(state)));
            } else {
                phrase.push_back(opts.id_prefix + "md" + std::to_string(mid_pop.sample(state)));
            }
        }
    }

    auto append_noise = [&](std::vector<std::string>& tokens, std::size_t n_phrases) {
        for (std::size_t i = 0; i < n_phrases; ++i) {
            const auto& phrase = phrases[phrase_pop.sample(state) - 1];
            tokens.insert(tokens.end(), phrase.begin(), phrase.end());
        }
    };

    ClusteredCorpus out;
    for (std::size_t c = 0; c < opts.clusters; ++c) {
        std::size_t n_api =
            opts.api_tokens_min + bounded(state, opts.api_tokens_max - opts.api_tokens_min + 1);
        std::vector<std::string> api;
        api.reserve(n_api);
        for (std::size_t j = 0; j < n_api; ++j) {
            api.push_back(opts.id_prefix + "api" + std::to_string(c) + "_" +
                          std::to_string(j));
        }
        std::size_t n_members =
            opts.members_min + bounded(state, opts.members_max - opts.members_min + 1);
        std::string question = opts.id_prefix + "q" + std::to_string(c);
        for (std::size_t m = 0; m < n_members; ++m) {
            std::vector<std::string> tokens;
            for (const auto& tok : api) {
                if (unit_double(state) < opts.member_api_keep) tokens.push_back(tok);
            }
            if (tokens.size() < 2) tokens.assign(api.begin(), api.begin() + 2);
            append_noise(tokens, noise_len.sample(state));
            CodeSnippet s;
            s.id = opts.id_prefix + std::to_string(c) + "_m" + std::to_string(m);
            s.language = opts.language;
            s.text = statements_text(tokens);
            out.pairs.push_back({question, s.id});
            out.snippets.push_back(std::move(s));
        }
    }
    for (std::size_t d = 0; d < opts.distractors; ++d) {
        std::vector<std::string> tokens;
        append_noise(tokens, noise_len.sample(state));
        if (tokens.empty()) tokens.push_back(opts.id_prefix + "cm1");
        CodeSnippet s;
        s.id = opts.id_prefix + "dx" + std::to_string(d);
        s.language = opts.language;
        s.text = statements_text(tokens);
        out.snippets.push_back(std::move(s));
    }
    return out;
}

} // namespace senatus::synth
