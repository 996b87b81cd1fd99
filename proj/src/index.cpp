#include "senatus/index.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "senatus/errors.hpp"
#include "senatus/fingerprint.hpp"
#include "senatus/logging.hpp"
#include "senatus/parallel.hpp"
#include "senatus/parser.hpp"
#include "senatus/sha1.hpp"

namespace senatus::index {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kRecordsMagic[8] = {'S', 'E', 'N', 'R', 'E', 'C', '0', '1'};
constexpr char kBandMagic[8] = {'S', 'E', 'N', 'B', 'N', 'D', '0', '1'};

// ---- little-endian primitives ----------------------------------------------

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
public:
    ByteReader(const std::string& data, std::string name)
        : data_(data), name_(std::move(name)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void expect_magic(const char (&magic)[8]) {
        need(8);
        if (std::memcmp(data_.data() + pos_, magic, 8) != 0) {
            throw CorruptIndex(name_ + ": bad magic");
        }
        pos_ += 8;
    }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw CorruptIndex(name_ + ": truncated");
    }
    const std::string& data_;
    std::string name_;
    std::size_t pos_ = 0;
};

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MissingComponent("missing index file: " + path.string());
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return data;
}

void write_file(const fs::path& path, const std::string& data, std::uint64_t* bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write: " + path.string());
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw IoError("write failed: " + path.string());
    if (bytes) *bytes += data.size();
}

std::string format_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json manifest_to_json(const IndexManifest& m) {
    json j;
    j["format_version"] = m.format_version;
    j["lsh"] = {{"bands", m.lsh.bands},
                {"rows", m.lsh.rows},
                {"seed", m.lsh.seed},
                {"maxlength", m.lsh.maxlength}};
    j["selection"] = {{"mode", scoring::selection_mode_name(m.selection.mode)},
                      {"k", m.selection.k},
                      {"n", m.selection.n},
                      {"scorer", scoring::scorer_name(m.selection.scorer)}};
    j["fingerprint"] = m.fingerprint_algorithm;
    j["corpus_size"] = m.corpus_size;
    j["vocabulary_size"] = m.vocabulary_size;
    j["created_at"] = m.created_at;
    return j;
}

IndexManifest manifest_from_json(const json& j) {
    IndexManifest m;
    m.format_version = j.at("format_version").get<std::uint32_t>();
    m.lsh.bands = j.at("lsh").at("bands").get<std::uint32_t>();
    m.lsh.rows = j.at("lsh").at("rows").get<std::uint32_t>();
    m.lsh.seed = j.at("lsh").at("seed").get<std::uint64_t>();
    m.lsh.maxlength = j.at("lsh").at("maxlength").get<std::uint32_t>();
    std::string mode = j.at("selection").at("mode").get<std::string>();
    if (!scoring::parse_selection_mode(mode, m.selection.mode)) {
        throw CorruptIndex("manifest: unknown selection mode " + mode);
    }
    m.selection.k = j.at("selection").at("k").get<std::uint32_t>();
    m.selection.n = j.at("selection").at("n").get<double>();
    std::string scorer = j.at("selection").at("scorer").get<std::string>();
    if (!scoring::parse_scorer(scorer, m.selection.scorer)) {
        throw CorruptIndex("manifest: unknown scorer " + scorer);
    }
    m.fingerprint_algorithm = j.at("fingerprint").get<std::string>();
    m.corpus_size = j.at("corpus_size").get<std::uint64_t>();
    m.vocabulary_size = j.at("vocabulary_size").get<std::uint64_t>();
    m.created_at = j.at("created_at").get<std::string>();
    return m;
}

} // namespace

std::string default_created_at() {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long epoch = std::strtoll(env, &end, 10);
        if (end && *end == '\0') return format_utc(static_cast<std::time_t>(epoch));
    }
    return format_utc(std::time(nullptr));
}

std::string dedup_key(const frontend::FeatureSet& features) {
    Sha1 h;
    for (const auto& [term, count] : features.terms) {  // std::map: ascending terms
        h.update(term);
        h.update("\0", 1);
        h.update(std::to_string(count));
        h.update("\n", 1);
    }
    return h.hex_digest();
}

scoring::CorpusTermStats LshIndex::term_stats() const {
    scoring::CorpusTermStats stats;
    stats.corpus_size = manifest.corpus_size;
    stats.term_frequency.reserve(vocab_terms.size());
    for (std::size_t i = 0; i < vocab_terms.size(); ++i) {
        stats.term_frequency.emplace(vocab_terms[i], vocab_freq[i]);
    }
    return stats;
}

LshIndex build_index(CorpusReader& corpus, const BuildOptions& opts, BuildReport* report) {
    const auto& lsh = opts.lsh;
    const auto& sel = opts.selection;
    if (lsh.bands < 1 || lsh.rows < 1 || lsh.maxlength < 1) {
        throw Error("invalid LSH parameters: bands, rows and maxlength must be >= 1");
    }
    if (sel.mode != scoring::SelectionMode::kNone) {
        if (sel.k < 1) throw Error("invalid selection: K must be >= 1");
        if (!(sel.n > 0.0 && sel.n <= 100.0)) {
            throw Error("invalid selection: N must be in (0, 100]");
        }
        if (lsh.maxlength < sel.k) {
            throw Error("invalid parameters: maxlength must be >= K");
        }
    }

    BuildReport local_report;
    BuildReport& rep = report ? *report : local_report;
    rep = BuildReport{};

    // Pass 1: dedup and corpus term statistics.
    scoring::CorpusTermStats stats;
    std::unordered_set<std::string> seen_keys;
    std::unordered_set<std::string> kept_ids;
    std::unordered_set<std::string> all_ids;

    {
        CodeSnippet s;
        corpus.reset();
        while (corpus.next(s)) {
            ++rep.records_in;
            if (!all_ids.insert(s.id).second) {
                throw IoError("duplicate snippet id in corpus: " + s.id);
            }
            frontend::FeatureSet features;
            try {
                features = frontend::extract_features(frontend::parse(s));
            } catch (const ParseError& e) {
                ++rep.parse_failures;
                log_warn("skipping " + s.id + ": " + e.what());
                continue;
            } catch (const UnsupportedLanguage& e) {
                ++rep.parse_failures;
                log_warn("skipping " + s.id + ": " + e.what());
                continue;
            }
            if (features.empty()) {
                ++rep.parse_failures;
                log_warn("skipping " + s.id + ": no extractable features");
                continue;
            }
            if (!seen_keys.insert(dedup_key(features)).second) {
                ++rep.dedup_dropped;
                continue;
            }
            stats.add(features);
            kept_ids.insert(s.id);
        }
    }

    LshIndex out;
    out.manifest.format_version = kFormatVersion;
    out.manifest.lsh = lsh;
    out.manifest.selection = sel;
    out.manifest.fingerprint_algorithm = kFingerprintAlgorithm;
    out.manifest.corpus_size = stats.corpus_size;
    out.manifest.created_at = opts.created_at.empty() ? default_created_at() : opts.created_at;

    // Vocabulary: lexicographic term order defines dense ids.
    out.vocab_terms.reserve(stats.term_frequency.size());
    for (const auto& [term, freq] : stats.term_frequency) out.vocab_terms.push_back(term);
    std::sort(out.vocab_terms.begin(), out.vocab_terms.end());
    out.vocab_freq.resize(out.vocab_terms.size());
    out.term_to_id.reserve(out.vocab_terms.size());
    for (std::uint32_t i = 0; i < out.vocab_terms.size(); ++i) {
        out.vocab_freq[i] = stats.term_frequency.at(out.vocab_terms[i]);
        out.term_to_id.emplace(out.vocab_terms[i], i);
    }
    out.manifest.vocabulary_size = out.vocab_terms.size();

    // Pass 2: featurize, select, pad, minhash.
    std::vector<CodeSnippet> kept;
    kept.reserve(kept_ids.size());
    {
        CodeSnippet s;
        corpus.reset();
        std::unordered_set<std::string> pending = kept_ids;
        while (corpus.next(s)) {
            auto it = pending.find(s.id);
            if (it == pending.end()) continue;
            pending.erase(it);
            kept.push_back(std::move(s));
        }
        if (!pending.empty()) {
            throw IoError("corpus changed between passes: " +
                          std::to_string(pending.size()) + " records disappeared");
        }
    }

    auto family = std::make_shared<sketch::HashFamily>(lsh.signature_length(), lsh.seed);
    out.hash_family = family;

    struct Prepared {
        StoredRecord record;
        std::vector<sketch::BandKey> keys;
    };
    std::vector<Prepared> prepared(kept.size());

    parallel_for(kept.size(), opts.threads, [&](std::size_t i) {
        const CodeSnippet& s = kept[i];
        auto spt = frontend::parse(s);
        auto features = frontend::extract_features(spt);

        frontend::FeatureSet selected;
        if (sel.mode == scoring::SelectionMode::kNone) {
            selected = features;
        } else {
            auto leaf_counts = spt.leaf_counts();
            selected = scoring::select_features(features, sel, &stats, &leaf_counts);
        }

        frontend::FeatureSet hashed =
            sel.mode == scoring::SelectionMode::kNone
                ? selected
                : sketch::pad(selected, lsh.maxlength, s.id);

        auto sig = sketch::minhash(sketch::feature_ids(hashed), *family, lsh);

        Prepared& p = prepared[i];
        p.record.id = s.id;
        p.record.origin = s.origin;
        p.record.full.reserve(features.terms.size());
        for (const auto& [term, count] : features.terms) {
            p.record.full.emplace_back(out.term_to_id.at(term), count);
        }
        std::sort(p.record.full.begin(), p.record.full.end());
        p.record.selected.reserve(selected.terms.size());
        for (const auto& [term, count] : selected.terms) {
            p.record.selected.push_back(out.term_to_id.at(term));
        }
        std::sort(p.record.selected.begin(), p.record.selected.end());
        p.keys = sketch::band_keys(sig, lsh);
    });

    // Records sorted by id; bucket insertion follows that order.
    std::vector<std::uint32_t> order(prepared.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return prepared[a].record.id < prepared[b].record.id;
    });

    out.records.reserve(prepared.size());
    out.bands.resize(lsh.bands);
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        Prepared& p = prepared[order[rank]];
        out.record_index_by_id.emplace(p.record.id, rank);
        for (const auto& key : p.keys) {
            out.bands[key.band_index][key.digest].push_back(rank);
        }
        out.records.push_back(std::move(p.record));
    }

    rep.records_stored = out.records.size();
    rep.vocabulary_size = out.vocab_terms.size();
    log_info("indexed " + std::to_string(rep.records_stored) + " of " +
             std::to_string(rep.records_in) + " records (dedup dropped " +
             std::to_string(rep.dedup_dropped) + ", parse failures " +
             std::to_string(rep.parse_failures) + ", vocabulary " +
             std::to_string(rep.vocabulary_size) + ")");
    return out;
}

std::uint64_t file_checksum(const std::string& path) {
    std::string data = read_file(path);
    return fnv1a64(data.data(), data.size());
}

namespace {

std::string hex64(std::uint64_t v) {
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = hex[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace

void save_index(const LshIndex& index, const std::string& directory, BuildReport* report) {
    fs::path dir(directory);
    std::error_code ec;
    fs::create_directories(dir / "buckets", ec);
    if (ec) throw IoError("cannot create index directory: " + directory);
    // Drop any stale band files from a previous save.
    for (const auto& entry : fs::directory_iterator(dir / "buckets")) {
        fs::remove(entry.path());
    }

    std::uint64_t bytes = 0;
    std::vector<std::pair<std::string, std::string>> files;  // relpath -> content

    files.emplace_back("manifest.json", manifest_to_json(index.manifest).dump(2) + "\n");

    {
        std::string vocab;
        for (std::size_t i = 0; i < index.vocab_terms.size(); ++i) {
            vocab += index.vocab_terms[i];
            vocab += '\t';
            vocab += std::to_string(i);
            vocab += '\t';
            vocab += std::to_string(index.vocab_freq[i]);
            vocab += '\n';
        }
        files.emplace_back("vocab.tsv", std::move(vocab));
    }

    {
        std::string recs(kRecordsMagic, 8);
        put_u64(recs, index.records.size());
        for (const auto& r : index.records) {
            put_u32(recs, static_cast<std::uint32_t>(r.id.size()));
            recs += r.id;
            recs.push_back(r.origin ? '\x01' : '\x00');
            if (r.origin) {
                put_u32(recs, static_cast<std::uint32_t>(r.origin->path.size()));
                recs += r.origin->path;
                put_u32(recs, r.origin->line_begin);
                put_u32(recs, r.origin->line_end);
            }
            put_u32(recs, static_cast<std::uint32_t>(r.full.size()));
            for (const auto& [id, count] : r.full) {
                put_u32(recs, id);
                put_u32(recs, count);
            }
            put_u32(recs, static_cast<std::uint32_t>(r.selected.size()));
            for (std::uint32_t id : r.selected) put_u32(recs, id);
        }
        files.emplace_back("records.bin", std::move(recs));
    }

    for (std::uint32_t b = 0; b < index.bands.size(); ++b) {
        std::string band(kBandMagic, 8);
        put_u32(band, b);
        std::vector<std::uint64_t> digests;
        digests.reserve(index.bands[b].size());
        for (const auto& [digest, ids] : index.bands[b]) digests.push_back(digest);
        std::sort(digests.begin(), digests.end());
        put_u64(band, digests.size());
        for (std::uint64_t digest : digests) {
            const auto& ids = index.bands[b].at(digest);
            put_u64(band, digest);
            put_u32(band, static_cast<std::uint32_t>(ids.size()));
            for (std::uint32_t id : ids) put_u32(band, id);
        }
        files.emplace_back("buckets/band-" + std::to_string(b) + ".bin", std::move(band));
    }

    std::string checksums;
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [rel, content] : files) {
        write_file(dir / rel, content, &bytes);
        checksums += hex64(fnv1a64(content.data(), content.size()));
        checksums += "  ";
        checksums += rel;
        checksums += '\n';
    }
    write_file(dir / "checksums.txt", checksums, &bytes);

    if (report) report->bytes_written = bytes;
}

LshIndex load_index(const std::string& directory) {
    fs::path dir(directory);
    if (!fs::exists(dir / "manifest.json")) {
        throw MissingComponent("missing index file: " + (dir / "manifest.json").string());
    }

    // Manifest first: version gates everything else.
    std::string manifest_text = read_file(dir / "manifest.json");
    json mj;
    try {
        mj = json::parse(manifest_text);
    } catch (const json::exception& e) {
        throw CorruptIndex(std::string("manifest.json: ") + e.what());
    }
    IndexManifest manifest;
    try {
        manifest = manifest_from_json(mj);
    } catch (const json::exception& e) {
        throw CorruptIndex(std::string("manifest.json: ") + e.what());
    }
    if (manifest.format_version != kFormatVersion) {
        throw VersionMismatch("index format version " +
                              std::to_string(manifest.format_version) +
                              " (expected " + std::to_string(kFormatVersion) + ")");
    }
    if (manifest.fingerprint_algorithm != kFingerprintAlgorithm) {
        throw VersionMismatch("unknown fingerprint algorithm: " +
                              manifest.fingerprint_algorithm);
    }

    // Verify every checksummed component before trusting it.
    std::string checks = read_file(dir / "checksums.txt");
    std::unordered_map<std::string, std::string> contents;
    {
        std::size_t pos = 0;
        std::size_t line_no = 0;
        while (pos < checks.size()) {
            std::size_t eol = checks.find('\n', pos);
            if (eol == std::string::npos) eol = checks.size();
            std::string line = checks.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (line.empty()) continue;
            std::size_t sep = line.find("  ");
            if (sep != 16 || line.size() < 19) {
                throw CorruptIndex("checksums.txt line " + std::to_string(line_no));
            }
            std::string hexsum = line.substr(0, 16);
            std::string rel = line.substr(18);
            std::string data = read_file(dir / rel);
            if (hex64(fnv1a64(data.data(), data.size())) != hexsum) {
                throw CorruptIndex("checksum mismatch: " + rel);
            }
            contents.emplace(rel, std::move(data));
        }
    }
    for (const char* required : {"manifest.json", "vocab.tsv", "records.bin"}) {
        if (!contents.count(required)) {
            throw MissingComponent(std::string("checksums.txt does not list ") + required);
        }
    }

    LshIndex out;
    out.manifest = manifest;
    out.hash_family = std::make_shared<sketch::HashFamily>(
        manifest.lsh.signature_length(), manifest.lsh.seed);

    // vocab.tsv
    {
        const std::string& vocab = contents.at("vocab.tsv");
        std::size_t pos = 0;
        while (pos < vocab.size()) {
            std::size_t eol = vocab.find('\n', pos);
            if (eol == std::string::npos) break;
            std::string line = vocab.substr(pos, eol - pos);
            pos = eol + 1;
            std::size_t t1 = line.rfind('\t');
            std::size_t t0 = t1 == std::string::npos ? std::string::npos
                                                     : line.rfind('\t', t1 - 1);
            if (t0 == std::string::npos) throw CorruptIndex("vocab.tsv: bad line");
            std::string term = line.substr(0, t0);
            std::uint32_t id = 0;
            std::uint64_t freq = 0;
            try {
                id = static_cast<std::uint32_t>(std::stoul(line.substr(t0 + 1, t1 - t0 - 1)));
                freq = std::stoull(line.substr(t1 + 1));
            } catch (const std::exception&) {
                throw CorruptIndex("vocab.tsv: bad line");
            }
            if (id != out.vocab_terms.size()) {
                throw CorruptIndex("vocab.tsv: ids not dense/sorted");
            }
            out.vocab_terms.push_back(term);
            out.vocab_freq.push_back(freq);
            out.term_to_id.emplace(std::move(term), id);
        }
        if (out.vocab_terms.size() != manifest.vocabulary_size) {
            throw CorruptIndex("vocab.tsv: size does not match manifest");
        }
    }

    // records.bin
    {
        ByteReader r(contents.at("records.bin"), "records.bin");
        r.expect_magic(kRecordsMagic);
        std::uint64_t count = r.u64();
        if (count != manifest.corpus_size) {
            throw CorruptIndex("records.bin: count does not match manifest");
        }
        out.records.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            StoredRecord rec;
            rec.id = r.bytes(r.u32());
            if (r.u8()) {
                SnippetOrigin origin;
                origin.path = r.bytes(r.u32());
                origin.line_begin = r.u32();
                origin.line_end = r.u32();
                rec.origin = std::move(origin);
            }
            std::uint32_t n_full = r.u32();
            rec.full.reserve(n_full);
            for (std::uint32_t k = 0; k < n_full; ++k) {
                std::uint32_t id = r.u32();
                std::uint32_t cnt = r.u32();
                if (id >= out.vocab_terms.size()) {
                    throw CorruptIndex("records.bin: term id out of range");
                }
                rec.full.emplace_back(id, cnt);
            }
            std::uint32_t n_sel = r.u32();
            rec.selected.reserve(n_sel);
            for (std::uint32_t k = 0; k < n_sel; ++k) {
                std::uint32_t id = r.u32();
                if (id >= out.vocab_terms.size()) {
                    throw CorruptIndex("records.bin: term id out of range");
                }
                rec.selected.push_back(id);
            }
            out.record_index_by_id.emplace(rec.id, static_cast<std::uint32_t>(i));
            out.records.push_back(std::move(rec));
        }
        if (!r.exhausted()) throw CorruptIndex("records.bin: trailing bytes");
    }

    // buckets/band-<j>.bin
    out.bands.resize(manifest.lsh.bands);
    for (std::uint32_t b = 0; b < manifest.lsh.bands; ++b) {
        std::string rel = "buckets/band-" + std::to_string(b) + ".bin";
        auto it = contents.find(rel);
        if (it == contents.end()) throw MissingComponent("missing " + rel);
        ByteReader r(it->second, rel);
        r.expect_magic(kBandMagic);
        if (r.u32() != b) throw CorruptIndex(rel + ": band index mismatch");
        std::uint64_t buckets = r.u64();
        for (std::uint64_t k = 0; k < buckets; ++k) {
            std::uint64_t digest = r.u64();
            std::uint32_t n = r.u32();
            std::vector<std::uint32_t> ids;
            ids.reserve(n);
            for (std::uint32_t j = 0; j < n; ++j) {
                std::uint32_t id = r.u32();
                if (id >= out.records.size()) {
                    throw CorruptIndex(rel + ": record ordinal out of range");
                }
                ids.push_back(id);
            }
            out.bands[b].emplace(digest, std::move(ids));
        }
        if (!r.exhausted()) throw CorruptIndex(rel + ": trailing bytes");
    }

    return out;
}

} // namespace senatus::index
