#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/textproc.hpp"

namespace testing_support {

using semoverlap::EmbeddingTable;

/// Table of `count` tokens "w0".."w{count-1}" with Gaussian vectors.
inline EmbeddingTable random_table(std::size_t count, std::size_t dim, std::uint64_t seed,
                                   const std::string& prefix = "w") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    EmbeddingTable table;
    std::vector<float> v(dim);
    for (std::size_t t = 0; t < count; ++t) {
        for (auto& x : v)
            x = gauss(rng);
        table.add(prefix + std::to_string(t), v);
    }
    return table;
}

/// Tokens named after their index place the vector at e_index (scaled).
inline EmbeddingTable one_hot_table(const std::vector<std::string>& tokens, float scale = 1.0f) {
    EmbeddingTable table;
    std::vector<float> v(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        std::fill(v.begin(), v.end(), 0.0f);
        v[t] = scale;
        table.add(tokens[t], v);
    }
    return table;
}

inline semoverlap::Sentence words(const std::vector<std::string>& tokens) {
    return {semoverlap::join_tokens(tokens), tokens};
}

/// Random sentence of `length` tokens drawn from "w0".."w{vocab-1}".
inline semoverlap::Sentence random_sentence(std::mt19937_64& rng, std::size_t vocab, std::size_t length,
                                            const std::string& prefix = "w") {
    std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < length; ++i)
        toks.push_back(prefix + std::to_string(pick(rng)));
    return words(toks);
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("semoverlap-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream out(file(name), std::ios::binary);
        out << content;
        return file(name);
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace testing_support
