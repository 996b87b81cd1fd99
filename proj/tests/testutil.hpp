// testutil.hpp - shared helpers for the test suites
#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>
#include <string>
#include <vector>

#include "senatus/fingerprint.hpp"
#include "senatus/snippet.hpp"

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / (tag + "-" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

// Deterministic uniform helpers built on splitmix64.
inline std::uint64_t rng_next(std::uint64_t& state) { return senatus::splitmix64(state); }
inline std::uint64_t rng_below(std::uint64_t& state, std::uint64_t n) {
    return senatus::splitmix64(state) % n;
}
inline double rng_unit(std::uint64_t& state) {
    return static_cast<double>(senatus::splitmix64(state) >> 11) * 0x1.0p-53;
}

// Whole-word identifier replacement (no regex, boundary-aware).
inline std::string replace_identifier(const std::string& src, const std::string& from,
                                      const std::string& to) {
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
    };
    std::string out;
    std::size_t i = 0;
    while (i < src.size()) {
        if (src.compare(i, from.size(), from) == 0 &&
            (i == 0 || !is_word(src[i - 1])) &&
            (i + from.size() >= src.size() || !is_word(src[i + from.size()]))) {
            out += to;
            i += from.size();
        } else {
            out.push_back(src[i++]);
        }
    }
    return out;
}

// Semantics-preserving Java mutations: rename locals named v<digit>, reflow
// whitespace, churn comments/docstrings. Variant 0 is the original.
inline std::string mutate_java_method(const std::string& source, std::uint32_t variant) {
    if (variant == 0) return source;
    std::string out = source;
    for (int v = 0; v < 10; ++v) {
        std::string from = "v" + std::to_string(v);
        std::string to = "renamed" + std::to_string(v) + "_" + std::to_string(variant);
        out = replace_identifier(out, from, to);
    }
    switch (variant % 4) {
        case 1: {  // collapse runs of whitespace outside literals (crude but safe
                   // for the fixture methods, which contain no string literals)
            std::string flat;
            bool prev_space = false;
            for (char c : out) {
                bool space = c == ' ' || c == '\n' || c == '\t';
                if (space) {
                    if (!prev_space) flat.push_back(' ');
                } else {
                    flat.push_back(c);
                }
                prev_space = space;
            }
            out = "/** docstring variant " + std::to_string(variant) + " */\n" + flat;
            break;
        }
        case 2:
            out = "// touched by variant " + std::to_string(variant) + "\n" + out + "\n\n";
            break;
        case 3: {
            std::string spaced;
            for (char c : out) {
                spaced.push_back(c);
                if (c == ';') spaced += "\n\n\t";
            }
            out = "/* block comment " + std::to_string(variant) + " */ " + spaced;
            break;
        }
        default:
            out = "/** @param none (variant " + std::to_string(variant) + ") */\n" + out;
            break;
    }
    return out;
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

inline std::string cli_path() {
    const char* p = std::getenv("SENATUS_CLI");
    return p ? p : "senatus";
}

inline CliResult run_cli(const std::string& args) {
    CliResult res;
    std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, n);
    int status = pclose(pipe);
    res.exit_code = WEXITSTATUS(status);
    return res;
}

} // namespace testutil
