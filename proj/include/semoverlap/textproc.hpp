#pragma once

#include <cctype>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/stopwords.hpp"

namespace semoverlap {

struct TokenizerConfig {
    bool lowercase = true;
    /// Split at ASCII punctuation boundaries and drop punctuation-only pieces.
    /// When off, whitespace-delimited tokens are kept intact.
    bool strip_punctuation = true;
};

struct Sentence {
    std::string raw;
    std::vector<std::string> tokens;

    bool operator==(const Sentence&) const = default;
};

/// Normalized bag of words: weights are parallel to support and sum to one.
struct NBow {
    std::vector<TokenId> support;
    std::vector<double> weights;
    std::size_t source_token_count = 0;

    bool empty() const noexcept { return support.empty(); }
    std::size_t size() const noexcept { return support.size(); }
};

struct CorpusPair {
    std::string id;
    std::vector<Sentence> document;
    std::vector<Sentence> summary;
};

namespace detail {

inline bool is_ascii_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline bool is_ascii_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

} // namespace detail

inline Sentence tokenize(std::string_view raw, const TokenizerConfig& config = {}) {
    Sentence sentence{std::string(raw), {}};
    std::string current;
    auto flush = [&] {
        if (!current.empty())
            sentence.tokens.push_back(std::move(current));
        current.clear();
    };
    for (char c : raw) {
        if (detail::is_ascii_space(c)) {
            flush();
            continue;
        }
        if (config.strip_punctuation && detail::is_ascii_punct(c)) {
            flush();
            continue;
        }
        if (config.lowercase)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        current.push_back(c);
    }
    flush();
    return sentence;
}

inline std::vector<Sentence> tokenize_all(std::span<const std::string> raws,
                                          const TokenizerConfig& config = {}) {
    std::vector<Sentence> out;
    out.reserve(raws.size());
    for (const auto& r : raws)
        out.push_back(tokenize(r, config));
    return out;
}

/// Drops stopwords and out-of-vocabulary tokens, then normalizes counts.
/// Support is ordered by first occurrence. An all-dropped sentence yields an
/// empty support.
inline NBow to_nbow(const Sentence& sentence, const EmbeddingTable& table,
                    const StopwordSet* stopwords = nullptr) {
    NBow bow;
    bow.source_token_count = sentence.tokens.size();
    std::unordered_map<TokenId, std::size_t> slot;
    std::vector<std::size_t> counts;
    std::size_t kept = 0;
    for (const auto& tok : sentence.tokens) {
        if (stopwords && stopwords->contains(tok))
            continue;
        auto id = table.id(tok);
        if (!id)
            continue;
        auto [it, inserted] = slot.try_emplace(*id, bow.support.size());
        if (inserted) {
            bow.support.push_back(*id);
            counts.push_back(0);
        }
        ++counts[it->second];
        ++kept;
    }
    bow.weights.reserve(counts.size());
    for (std::size_t c : counts)
        bow.weights.push_back(static_cast<double>(c) / static_cast<double>(kept));
    return bow;
}

inline Sentence concat_sentences(std::span<const Sentence> sentences) {
    if (sentences.empty())
        throw Error(ErrorKind::input, "concat_sentences needs at least one sentence");
    Sentence out = sentences.front();
    for (std::size_t i = 1; i < sentences.size(); ++i) {
        out.raw += ' ';
        out.raw += sentences[i].raw;
        out.tokens.insert(out.tokens.end(), sentences[i].tokens.begin(), sentences[i].tokens.end());
    }
    return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty())
            out += ' ';
        out += t;
    }
    return out;
}

} // namespace semoverlap
