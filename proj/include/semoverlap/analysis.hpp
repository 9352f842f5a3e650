#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/metrics.hpp"
#include "semoverlap/overlap.hpp"
#include "semoverlap/parallel.hpp"
#include "semoverlap/textproc.hpp"

namespace semoverlap {

/// Position-wise mean of the sorted closest-document-sentence distances.
struct AlphaProfile {
    std::size_t alpha = 1;
    std::vector<double> mean_distances;
    /// mean_distances[1] - mean_distances[0]; absent when alpha == 1.
    std::optional<double> gap;
    std::size_t sentence_count = 0;
    std::size_t skipped_pairs = 0;
    std::size_t skipped_sentences = 0;
};

namespace detail {

struct PairDistances {
    std::vector<std::vector<double>> closest;
    bool skipped_pair = false;
    std::size_t skipped_sentences = 0;
};

} // namespace detail

/// For every summary sentence, the `alpha` smallest WMDs to its document's
/// sentences. Pairs with fewer than `alpha` document sentences are skipped,
/// as are summary sentences whose bag is empty or that have fewer than
/// `alpha` non-degenerate document sentences. Averaging is per sentence.
inline AlphaProfile alpha_profile(std::span<const SummaryRecord> summaries, std::span<const CorpusPair> documents,
                                  std::size_t alpha, const EmbeddingTable& table,
                                  const StopwordSet* stopwords = nullptr, std::size_t workers = 1) {
    if (alpha == 0)
        throw Error(ErrorKind::input, "alpha must be >= 1");
    std::unordered_map<std::string, std::size_t> doc_index;
    for (std::size_t i = 0; i < documents.size(); ++i)
        doc_index.emplace(documents[i].id, i);
    std::vector<std::size_t> match(summaries.size());
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        auto it = doc_index.find(summaries[i].id);
        if (it == doc_index.end())
            throw Error(ErrorKind::alignment, "no document for summary id '" + summaries[i].id + "'");
        match[i] = it->second;
    }

    const auto per_pair = ordered_parallel_map(summaries.size(), workers, [&](std::size_t p) {
        detail::PairDistances out;
        const auto& doc = documents[match[p]].document;
        if (doc.size() < alpha) {
            out.skipped_pair = true;
            return out;
        }
        std::vector<NBow> doc_bows;
        doc_bows.reserve(doc.size());
        for (const auto& s : doc)
            doc_bows.push_back(to_nbow(s, table, stopwords));
        for (const auto& sentence : summaries[p].summary) {
            const NBow bow = to_nbow(sentence, table, stopwords);
            if (bow.empty()) {
                ++out.skipped_sentences;
                continue;
            }
            std::vector<double> d;
            d.reserve(doc.size());
            for (const auto& db : doc_bows)
                d.push_back(db.empty() ? std::numeric_limits<double>::infinity() : nbow_wmd(bow, db, table));
            std::sort(d.begin(), d.end());
            d.resize(alpha);
            if (std::isinf(d.back())) {
                ++out.skipped_sentences;
                continue;
            }
            out.closest.push_back(std::move(d));
        }
        return out;
    });

    AlphaProfile profile;
    profile.alpha = alpha;
    profile.mean_distances.assign(alpha, 0.0);
    for (const auto& pair : per_pair) {
        if (pair.skipped_pair) {
            ++profile.skipped_pairs;
            continue;
        }
        profile.skipped_sentences += pair.skipped_sentences;
        for (const auto& d : pair.closest) {
            for (std::size_t r = 0; r < alpha; ++r)
                profile.mean_distances[r] += d[r];
            ++profile.sentence_count;
        }
    }
    if (profile.sentence_count == 0)
        throw Error(ErrorKind::empty_profile, "no summary sentence was eligible for a closest-" +
                                                  std::to_string(alpha) + " profile");
    for (double& m : profile.mean_distances)
        m /= static_cast<double>(profile.sentence_count);
    if (alpha >= 2)
        profile.gap = profile.mean_distances[1] - profile.mean_distances[0];
    return profile;
}

struct AttributionInput {
    std::string pair_id;
    std::size_t j = 0;
    Sentence generated;
    std::array<Sentence, 2> sources;
};

struct AttributionRecord {
    std::string pair_id;
    std::size_t j = 0;
    double wmd_closer = 0.0;
    double wmd_farther = 0.0;
    bool degenerate = false;
};

struct AttributionReport {
    std::vector<AttributionRecord> records;
    /// Means over non-degenerate records only.
    double mean_closer = 0.0;
    double mean_farther = 0.0;
    std::size_t count = 0;
};

/// WMD from each generated sentence to both of the sources it was produced
/// from, sorted into (closer, farther).
inline AttributionReport attribution(std::span<const AttributionInput> inputs, const EmbeddingTable& table,
                                     const StopwordSet* stopwords = nullptr, std::size_t workers = 1) {
    AttributionReport report;
    report.records = ordered_parallel_map(inputs.size(), workers, [&](std::size_t i) {
        const auto& in = inputs[i];
        const NBow gen = to_nbow(in.generated, table, stopwords);
        const double d0 = score_nbows(gen, to_nbow(in.sources[0], table, stopwords), table).wmd;
        const double d1 = score_nbows(gen, to_nbow(in.sources[1], table, stopwords), table).wmd;
        return AttributionRecord{in.pair_id, in.j, std::min(d0, d1), std::max(d0, d1), std::isinf(std::max(d0, d1))};
    });
    for (const auto& r : report.records) {
        if (r.degenerate)
            continue;
        report.mean_closer += r.wmd_closer;
        report.mean_farther += r.wmd_farther;
        ++report.count;
    }
    if (report.count > 0) {
        report.mean_closer /= static_cast<double>(report.count);
        report.mean_farther /= static_cast<double>(report.count);
    }
    return report;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV with a "rank,mean_wmd" header and one row per rank. An optional
/// comment line is written first.
inline void export_profile(const AlphaProfile& profile, const std::string& path,
                           const std::optional<std::string>& comment = std::nullopt) {
    if (profile.mean_distances.empty())
        throw Error(ErrorKind::empty_profile, "refusing to export an empty profile");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::io, "cannot write " + path);
    if (comment)
        out << "# " << *comment << '\n';
    out << "rank,mean_wmd\n";
    for (std::size_t r = 0; r < profile.mean_distances.size(); ++r)
        out << r + 1 << ',' << format_double(profile.mean_distances[r]) << '\n';
    if (!out)
        throw Error(ErrorKind::io, "write failed for " + path);
}

} // namespace semoverlap
