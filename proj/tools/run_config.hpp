#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "json.hpp"

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/overlap.hpp"

namespace semoverlap::cli {

struct RunConfig {
    std::string embeddings;
    EmbeddingFormat embeddings_format = EmbeddingFormat::text;
    std::optional<std::size_t> limit;
    bool normalize = false;
    /// Path to a stopword file; empty means the built-in English list.
    std::string stopwords;
    bool no_stopwords = false;
    RewardParams reward{};
    std::size_t n = 1;
    std::size_t alpha = 5;
    bool prune = true;
    std::size_t workers = 1;
    std::string out = ".";

    void validate() const {
        reward.validate();
        if (n < 1)
            throw Error(ErrorKind::input, "n must be >= 1");
        if (alpha < 1)
            throw Error(ErrorKind::input, "alpha must be >= 1");
        if (workers < 1)
            throw Error(ErrorKind::input, "workers must be >= 1");
    }

    std::string stopword_source() const {
        if (no_stopwords)
            return "none";
        return stopwords.empty() ? "builtin:english" : stopwords;
    }

    /// Everything that can change output bytes. The worker count is left out
    /// on purpose: it never affects results.
    nlohmann::json echo() const {
        nlohmann::json emb = {{"path", embeddings},
                              {"format", embeddings_format == EmbeddingFormat::text ? "text" : "binary"},
                              {"normalize", normalize}};
        emb["limit"] = limit ? nlohmann::json(*limit) : nlohmann::json(nullptr);
        return {{"embeddings", std::move(emb)},
                {"stopwords", stopword_source()},
                {"a", reward.a},
                {"b", reward.b},
                {"n", n},
                {"alpha", alpha},
                {"prune", prune},
                {"solver", "exact"},
                {"tokenizer", {{"lowercase", true}, {"strip_punctuation", true}}}};
    }
};

} // namespace semoverlap::cli
