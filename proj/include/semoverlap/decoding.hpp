#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semoverlap/error.hpp"
#include "semoverlap/textproc.hpp"

namespace semoverlap {

using Trigram = std::array<std::string, 3>;
using TrigramSet = std::set<Trigram>;

struct BeamCandidate {
    Sentence text;
    double score = 0.0;
};

struct RerankResult {
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> blocked_slots;

    bool operator==(const RerankResult&) const = default;
};

inline std::vector<Trigram> trigrams(const std::vector<std::string>& tokens) {
    std::vector<Trigram> out;
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i)
        out.push_back({tokens[i], tokens[i + 1], tokens[i + 2]});
    return out;
}

/// True if any trigram of `tokens` is already in `seen` or occurs twice in
/// `tokens` itself.
inline bool has_repeated_trigram(const std::vector<std::string>& tokens, const TrigramSet& seen) {
    TrigramSet own;
    for (auto& tri : trigrams(tokens)) {
        if (seen.contains(tri))
            return true;
        if (!own.insert(std::move(tri)).second)
            return true;
    }
    return false;
}

/// Greedy slot-by-slot selection under trigram blocking. Within a slot,
/// candidates are tried by descending score (lowest index on ties). When
/// every candidate collides the best one is kept and the slot is reported
/// as blocked.
inline RerankResult rerank(const std::vector<std::vector<BeamCandidate>>& slots) {
    RerankResult result;
    TrigramSet seen;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto& cands = slots[s];
        if (cands.empty())
            throw Error(ErrorKind::input, "slot " + std::to_string(s) + " has no candidates");
        std::vector<std::size_t> order(cands.size());
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (!std::isfinite(cands[c].score))
                throw Error(ErrorKind::input, "non-finite score in slot " + std::to_string(s));
            order[c] = c;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return cands[x].score > cands[y].score; });
        std::optional<std::size_t> pick;
        for (std::size_t c : order)
            if (!has_repeated_trigram(cands[c].text.tokens, seen)) {
                pick = c;
                break;
            }
        if (!pick) {
            pick = order.front();
            result.blocked_slots.push_back(s);
        }
        result.chosen.push_back(*pick);
        for (auto& tri : trigrams(cands[*pick].text.tokens))
            seen.insert(std::move(tri));
    }
    return result;
}

} // namespace semoverlap
