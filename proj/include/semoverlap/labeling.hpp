#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/overlap.hpp"
#include "semoverlap/parallel.hpp"
#include "semoverlap/textproc.hpp"
#include "semoverlap/transport.hpp"

namespace semoverlap {

/// k[j][l] is the document index (0-based) extracted at position l for
/// summary sentence j.
struct ExtractionLabels {
    std::string pair_id;
    std::size_t n = 1;
    std::vector<std::vector<std::size_t>> k;
    std::vector<std::string> flags;

    bool operator==(const ExtractionLabels&) const = default;
};

struct ParaphraserExample {
    std::string pair_id;
    std::size_t j = 0;
    Sentence input;
    Sentence target;
};

struct LabelConfig {
    std::size_t n = 1;
    const StopwordSet* stopwords = nullptr;
    /// Skip exact solves whose centroid or relaxed bound already loses to the
    /// running argmin. Labels are identical either way.
    bool prune = true;
};

namespace detail {

inline std::vector<double> centroid(const NBow& bow, const EmbeddingTable& table) {
    std::vector<double> c(table.dim(), 0.0);
    for (std::size_t i = 0; i < bow.size(); ++i) {
        const auto r = table.row(bow.support[i]);
        for (std::size_t k = 0; k < c.size(); ++k)
            c[k] += bow.weights[i] * r[k];
    }
    return c;
}

inline double distance(const std::vector<double>& x, const std::vector<double>& y) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        sq += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(sq);
}

// A bound must clear the incumbent by this relative margin before a
// candidate is skipped, so rounding in the bound never changes a label.
inline bool bound_loses(double bound, double best) {
    return bound > best + 1e-9 * std::max(1.0, best);
}

} // namespace detail

/// Greedy WMD argmin labeling. Summary sentences are handled in order; each
/// takes n document sentences, and a document sentence is never reused
/// within the pair. Ties go to the lowest document index.
inline ExtractionLabels exemplary_extract(const CorpusPair& pair, const EmbeddingTable& table,
                                          const LabelConfig& config = {}) {
    if (config.n == 0)
        throw Error(ErrorKind::input, "extraction arity n must be >= 1");
    if (pair.document.empty() || pair.summary.empty())
        throw Error(ErrorKind::input, "pair '" + pair.id + "' needs a non-empty document and summary");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    const std::size_t doc_size = pair.document.size();
    std::vector<NBow> doc_bows;
    std::vector<std::vector<double>> doc_centroids;
    doc_bows.reserve(doc_size);
    for (const auto& s : pair.document) {
        doc_bows.push_back(to_nbow(s, table, config.stopwords));
        if (config.prune)
            doc_centroids.push_back(detail::centroid(doc_bows.back(), table));
    }

    ExtractionLabels labels{pair.id, config.n, {}, {}};
    std::vector<char> used(doc_size, 0);
    std::size_t taken = 0;

    for (std::size_t j = 0; j < pair.summary.size(); ++j) {
        const NBow gold = to_nbow(pair.summary[j], table, config.stopwords);
        const auto gold_centroid = config.prune && !gold.empty() ? detail::centroid(gold, table)
                                                                 : std::vector<double>{};
        if (gold.empty())
            labels.flags.push_back("degenerate_summary:" + std::to_string(j + 1));

        std::vector<std::optional<double>> exact(doc_size);
        std::vector<std::optional<double>> centroid_bound(doc_size);
        std::vector<std::optional<double>> relaxed_bound(doc_size);
        std::vector<std::size_t> row;
        row.reserve(config.n);

        for (std::size_t l = 0; l < config.n; ++l) {
            if (taken == doc_size)
                throw Error(ErrorKind::insufficient_document,
                            "pair '" + pair.id + "': document of " + std::to_string(doc_size) +
                                " sentences exhausted at summary sentence j=" + std::to_string(j + 1) +
                                ", l=" + std::to_string(l + 1));
            std::optional<std::size_t> best_idx;
            double best = kInf;
            for (std::size_t i = 0; i < doc_size; ++i) {
                if (used[i])
                    continue;
                if (gold.empty()) {
                    best_idx = i;
                    break;
                }
                double d = kInf;
                if (!doc_bows[i].empty()) {
                    if (exact[i]) {
                        d = *exact[i];
                    } else {
                        if (config.prune && best_idx) {
                            if (!centroid_bound[i])
                                centroid_bound[i] = detail::distance(gold_centroid, doc_centroids[i]);
                            if (detail::bound_loses(*centroid_bound[i], best))
                                continue;
                        }
                        const CostMatrix costs = cost_matrix(doc_bows[i], gold, table);
                        if (config.prune && best_idx) {
                            if (!relaxed_bound[i])
                                relaxed_bound[i] = rwmd_lower_bound(doc_bows[i], gold, costs);
                            if (detail::bound_loses(*relaxed_bound[i], best))
                                continue;
                        }
                        exact[i] = solve_exact(doc_bows[i], gold, costs).objective;
                        d = *exact[i];
                    }
                }
                if (!best_idx || d < best) {
                    best_idx = i;
                    best = d;
                }
            }
            used[*best_idx] = 1;
            ++taken;
            row.push_back(*best_idx);
        }
        labels.k.push_back(std::move(row));
    }
    return labels;
}

inline ExtractionLabels exemplary_extract(const CorpusPair& pair, std::size_t n, const EmbeddingTable& table,
                                          const StopwordSet* stopwords = nullptr) {
    return exemplary_extract(pair, table, LabelConfig{n, stopwords, false});
}

inline std::vector<ParaphraserExample> build_paraphraser_examples(const CorpusPair& pair,
                                                                  const ExtractionLabels& labels) {
    if (labels.k.size() != pair.summary.size())
        throw Error(ErrorKind::input, "labels for '" + pair.id + "' do not cover every summary sentence");
    std::vector<ParaphraserExample> out;
    out.reserve(pair.summary.size());
    for (std::size_t j = 0; j < labels.k.size(); ++j) {
        if (labels.k[j].empty())
            throw Error(ErrorKind::input, "empty label row in '" + pair.id + "'");
        std::vector<Sentence> picked;
        for (std::size_t idx : labels.k[j]) {
            if (idx >= pair.document.size())
                throw Error(ErrorKind::input, "label index out of range in '" + pair.id + "'");
            picked.push_back(pair.document[idx]);
        }
        out.push_back({pair.id, j, concat_sentences(picked), pair.summary[j]});
    }
    return out;
}

struct LabelOutcome {
    std::string pair_id;
    std::optional<ExtractionLabels> labels;
    std::optional<ErrorKind> error_kind;
    std::string error_message;

    bool ok() const noexcept { return labels.has_value(); }
};

/// Labels each pair independently; failures become error outcomes instead
/// of aborting the batch. Output order matches input order for any worker
/// count.
inline std::vector<LabelOutcome> label_corpus(std::span<const CorpusPair> corpus, const EmbeddingTable& table,
                                              const LabelConfig& config = {}, std::size_t workers = 1) {
    return ordered_parallel_map(corpus.size(), workers, [&](std::size_t idx) {
        const CorpusPair& pair = corpus[idx];
        try {
            return LabelOutcome{pair.id, exemplary_extract(pair, table, config), std::nullopt, {}};
        } catch (const Error& e) {
            return LabelOutcome{pair.id, std::nullopt, e.kind(), e.what()};
        }
    });
}

} // namespace semoverlap
