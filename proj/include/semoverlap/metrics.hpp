#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/overlap.hpp"
#include "semoverlap/parallel.hpp"
#include "semoverlap/textproc.hpp"

namespace semoverlap {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

struct RougeScores {
    PRF rouge1;
    PRF rouge2;
    PRF rougeL;
};

namespace detail {

inline PRF make_prf(double hits, double candidate_total, double reference_total) {
    PRF out;
    out.precision = candidate_total > 0 ? hits / candidate_total : 0.0;
    out.recall = reference_total > 0 ? hits / reference_total : 0.0;
    const double denom = out.precision + out.recall;
    out.f = denom > 0 ? 2.0 * out.precision * out.recall / denom : 0.0;
    return out;
}

inline std::vector<std::string> flatten(std::span<const Sentence> sentences) {
    std::vector<std::string> out;
    for (const auto& s : sentences)
        out.insert(out.end(), s.tokens.begin(), s.tokens.end());
    return out;
}

inline std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& tokens,
                                                                    std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return counts;
}

// Positions in `ref` of one longest common subsequence with `cand`,
// recovered by the usual backtrack that prefers dropping from `ref`.
inline std::vector<std::size_t> lcs_positions(const std::vector<std::string>& ref,
                                              const std::vector<std::string>& cand) {
    const std::size_t r = ref.size(), c = cand.size();
    std::vector<std::size_t> table((r + 1) * (c + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return table[i * (c + 1) + j]; };
    for (std::size_t i = 1; i <= r; ++i)
        for (std::size_t j = 1; j <= c; ++j)
            at(i, j) = ref[i - 1] == cand[j - 1] ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));
    std::vector<std::size_t> positions;
    std::size_t i = r, j = c;
    while (i > 0 && j > 0) {
        if (ref[i - 1] == cand[j - 1]) {
            positions.push_back(i - 1);
            --i;
            --j;
        } else if (at(i, j - 1) > at(i - 1, j)) {
            --j;
        } else {
            --i;
        }
    }
    std::reverse(positions.begin(), positions.end());
    return positions;
}

} // namespace detail

/// ROUGE-N with clipped n-gram counts over the concatenated token streams.
inline PRF rouge_n(std::span<const Sentence> candidate, std::span<const Sentence> reference, std::size_t n) {
    if (n == 0)
        throw Error(ErrorKind::input, "rouge_n needs n >= 1");
    const auto cand = detail::ngram_counts(detail::flatten(candidate), n);
    const auto ref = detail::ngram_counts(detail::flatten(reference), n);
    std::size_t cand_total = 0, ref_total = 0, hits = 0;
    for (const auto& [gram, count] : cand)
        cand_total += count;
    for (const auto& [gram, count] : ref) {
        ref_total += count;
        if (auto it = cand.find(gram); it != cand.end())
            hits += std::min(count, it->second);
    }
    return detail::make_prf(static_cast<double>(hits), static_cast<double>(cand_total),
                            static_cast<double>(ref_total));
}

/// Summary-level ROUGE-L. Each reference sentence contributes the union of
/// its LCS positions against every candidate sentence; hits are clipped by
/// the remaining token counts on both sides.
inline PRF rouge_l(std::span<const Sentence> candidate, std::span<const Sentence> reference) {
    std::unordered_map<std::string, std::size_t> cand_counts, ref_counts;
    std::size_t cand_total = 0, ref_total = 0;
    for (const auto& s : candidate)
        for (const auto& t : s.tokens) {
            ++cand_counts[t];
            ++cand_total;
        }
    for (const auto& s : reference)
        for (const auto& t : s.tokens) {
            ++ref_counts[t];
            ++ref_total;
        }
    std::size_t hits = 0;
    for (const auto& r : reference) {
        std::set<std::size_t> united;
        for (const auto& c : candidate)
            for (std::size_t p : detail::lcs_positions(r.tokens, c.tokens))
                united.insert(p);
        for (std::size_t p : united) {
            const auto& tok = r.tokens[p];
            auto& rc = ref_counts[tok];
            auto& cc = cand_counts[tok];
            if (rc > 0 && cc > 0) {
                ++hits;
                --rc;
                --cc;
            }
        }
    }
    return detail::make_prf(static_cast<double>(hits), static_cast<double>(cand_total),
                            static_cast<double>(ref_total));
}

inline RougeScores rouge(std::span<const Sentence> candidate, std::span<const Sentence> reference) {
    return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2), rouge_l(candidate, reference)};
}

struct SummaryWms {
    double value = 1.0;
    double wmd = 0.0;
    bool degenerate = false;
};

/// Whole-summary WMS: both sides are concatenated into one bag and scored
/// with e^(-wmd).
inline SummaryWms summary_wms(std::span<const Sentence> candidate, std::span<const Sentence> reference,
                              const EmbeddingTable& table, const StopwordSet* stopwords = nullptr) {
    const Sentence empty;
    const Sentence cand = candidate.empty() ? empty : concat_sentences(candidate);
    const Sentence ref = reference.empty() ? empty : concat_sentences(reference);
    const OverlapScore s = sentence_wmd(cand, ref, table, stopwords, kExpSimilarity);
    return {s.wms, s.wmd, s.degenerate};
}

struct SummaryRecord {
    std::string id;
    std::vector<Sentence> summary;
};

struct PairReport {
    std::string id;
    RougeScores rouge;
    SummaryWms wms;
};

struct CorpusReport {
    std::vector<PairReport> pairs;
    RougeScores mean_rouge;
    double mean_wms = 0.0;
    std::size_t pair_count = 0;
};

/// Scores candidates against references matched by id. Any id present on
/// only one side is an alignment error listing every offender.
inline CorpusReport evaluate_corpus(std::span<const SummaryRecord> candidates,
                                    std::span<const SummaryRecord> references, const EmbeddingTable& table,
                                    const StopwordSet* stopwords = nullptr, std::size_t workers = 1) {
    std::unordered_map<std::string, std::size_t> ref_index;
    for (std::size_t i = 0; i < references.size(); ++i)
        if (!ref_index.emplace(references[i].id, i).second)
            throw Error(ErrorKind::alignment, "duplicate reference id '" + references[i].id + "'");
    std::vector<std::string> missing;
    std::set<std::string> cand_ids;
    std::vector<std::size_t> match(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!cand_ids.insert(candidates[i].id).second)
            throw Error(ErrorKind::alignment, "duplicate candidate id '" + candidates[i].id + "'");
        auto it = ref_index.find(candidates[i].id);
        if (it == ref_index.end())
            missing.push_back(candidates[i].id);
        else
            match[i] = it->second;
    }
    for (const auto& r : references)
        if (!cand_ids.contains(r.id))
            missing.push_back(r.id);
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing)
            list += (list.empty() ? "" : ", ") + id;
        throw Error(ErrorKind::alignment, "unaligned ids: " + list);
    }
    if (candidates.empty())
        throw Error(ErrorKind::input, "no pairs to evaluate");

    CorpusReport report;
    report.pairs = ordered_parallel_map(candidates.size(), workers, [&](std::size_t i) {
        const auto& cand = candidates[i].summary;
        const auto& ref = references[match[i]].summary;
        return PairReport{candidates[i].id, rouge(cand, ref), summary_wms(cand, ref, table, stopwords)};
    });
    report.pair_count = report.pairs.size();

    auto accumulate = [](PRF& sum, const PRF& x) {
        sum.precision += x.precision;
        sum.recall += x.recall;
        sum.f += x.f;
    };
    for (const auto& p : report.pairs) {
        accumulate(report.mean_rouge.rouge1, p.rouge.rouge1);
        accumulate(report.mean_rouge.rouge2, p.rouge.rouge2);
        accumulate(report.mean_rouge.rougeL, p.rouge.rougeL);
        report.mean_wms += p.wms.value;
    }
    const double count = static_cast<double>(report.pair_count);
    for (PRF* prf : {&report.mean_rouge.rouge1, &report.mean_rouge.rouge2, &report.mean_rouge.rougeL}) {
        prf->precision /= count;
        prf->recall /= count;
        prf->f /= count;
    }
    report.mean_wms /= count;
    return report;
}

} // namespace semoverlap
