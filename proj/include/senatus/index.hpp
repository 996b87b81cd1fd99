// index.hpp - corpus ingestion, dedup, LSH table construction, persistence
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "senatus/features.hpp"
#include "senatus/jsonl.hpp"
#include "senatus/minhash.hpp"
#include "senatus/scoring.hpp"
#include "senatus/snippet.hpp"

namespace senatus::index {

inline constexpr std::uint32_t kFormatVersion = 1;

struct IndexManifest {
    std::uint32_t format_version = kFormatVersion;
    sketch::LshParams lsh;
    scoring::SelectionConfig selection;
    std::string fingerprint_algorithm;  // set by the builder
    std::uint64_t corpus_size = 0;      // stored records (post-dedup)
    std::uint64_t vocabulary_size = 0;
    std::string created_at;  // ISO-8601 UTC
};

struct StoredRecord {
    std::string id;
    // Full (pre-selection) feature vector: (term id, count), sorted by id.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> full;
    // Selected term ids, sorted; empty selection never stored.
    std::vector<std::uint32_t> selected;
    std::optional<SnippetOrigin> origin;
};

struct BuildReport {
    std::uint64_t records_in = 0;
    std::uint64_t parse_failures = 0;
    std::uint64_t dedup_dropped = 0;
    std::uint64_t records_stored = 0;
    std::uint64_t vocabulary_size = 0;
    std::uint64_t bytes_written = 0;  // filled by save()
};

struct LshIndex {
    IndexManifest manifest;

    std::vector<std::string> vocab_terms;   // term id -> term (lexicographic)
    std::vector<std::uint64_t> vocab_freq;  // term id -> corpus frequency
    std::unordered_map<std::string, std::uint32_t> term_to_id;

    std::vector<StoredRecord> records;  // sorted by id
    std::unordered_map<std::string, std::uint32_t> record_index_by_id;

    // band -> digest -> record ordinals (ascending)
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> bands;

    std::shared_ptr<const sketch::HashFamily> hash_family;

    std::optional<std::uint32_t> term_id(const std::string& term) const {
        auto it = term_to_id.find(term);
        if (it == term_to_id.end()) return std::nullopt;
        return it->second;
    }
    std::uint64_t term_frequency(const std::string& term) const {
        auto id = term_id(term);
        return id ? vocab_freq[*id] : 0;
    }
    // Materializes corpus term statistics (copies the vocabulary).
    scoring::CorpusTermStats term_stats() const;
};

struct BuildOptions {
    sketch::LshParams lsh;
    scoring::SelectionConfig selection;  // mode kNone: no selection, no padding
    std::string created_at;              // empty: SOURCE_DATE_EPOCH or current time
    unsigned threads = 0;                // 0: hardware concurrency
};

// SHA-1 hex of the canonical feature-vector serialization (terms ascending,
// each followed by its count). Alpha-equivalent snippets share a key.
std::string dedup_key(const frontend::FeatureSet& features);

// Two-pass build: pass 1 computes corpus term statistics over deduplicated
// records; pass 2 featurizes, selects, pads, minhashes and inserts.
// Per-record parse errors are logged and skipped; I/O errors abort.
LshIndex build_index(CorpusReader& corpus, const BuildOptions& opts,
                     BuildReport* report = nullptr);

// Durable on-disk layout: manifest.json, vocab.tsv, records.bin,
// buckets/band-<j>.bin, checksums.txt. Integers little-endian fixed-width.
void save_index(const LshIndex& index, const std::string& directory,
                BuildReport* report = nullptr);

// Throws MissingComponent / VersionMismatch / CorruptIndex.
LshIndex load_index(const std::string& directory);

// 64-bit file checksum used by checksums.txt (exposed for tests/tools).
std::uint64_t file_checksum(const std::string& path);

// ISO-8601 UTC; honors SOURCE_DATE_EPOCH when set, for reproducible builds.
std::string default_created_at();

} // namespace senatus::index
