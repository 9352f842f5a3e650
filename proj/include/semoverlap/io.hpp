#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "semoverlap/analysis.hpp"
#include "semoverlap/decoding.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/labeling.hpp"
#include "semoverlap/metrics.hpp"
#include "semoverlap/overlap.hpp"
#include "semoverlap/textproc.hpp"

// JSON-lines wire formats shared by the CLI and external trainers.
namespace semoverlap::io {

using nlohmann::json;

/// Finite values as numbers, infinities as the string "inf".
inline json number_or_inf(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

inline json parse_line(const std::string& line) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what());
    }
}

inline const json& field(const json& obj, const char* name) {
    if (!obj.is_object())
        throw Error(ErrorKind::parse, "expected a JSON object");
    auto it = obj.find(name);
    if (it == obj.end())
        throw Error(ErrorKind::parse, std::string("missing field \"") + name + "\"");
    return *it;
}

inline std::string string_field(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_string())
        throw Error(ErrorKind::parse, std::string("field \"") + name + "\" must be a string");
    return v.get<std::string>();
}

inline double number_field(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number())
        throw Error(ErrorKind::parse, std::string("field \"") + name + "\" must be a number");
    return v.get<double>();
}

inline std::vector<Sentence> sentence_list(const json& obj, const char* name, const TokenizerConfig& tok) {
    const json& v = field(obj, name);
    if (!v.is_array())
        throw Error(ErrorKind::parse, std::string("field \"") + name + "\" must be an array of strings");
    std::vector<Sentence> out;
    out.reserve(v.size());
    for (const auto& s : v) {
        if (!s.is_string())
            throw Error(ErrorKind::parse, std::string("field \"") + name + "\" must be an array of strings");
        out.push_back(tokenize(s.get<std::string>(), tok));
    }
    return out;
}

/// {"id": string, "document": [string], "summary": [string]}
inline CorpusPair corpus_pair_from_json(const json& obj, const TokenizerConfig& tok = {}) {
    CorpusPair pair{string_field(obj, "id"), sentence_list(obj, "document", tok), sentence_list(obj, "summary", tok)};
    if (pair.document.empty() || pair.summary.empty())
        throw Error(ErrorKind::input, "pair '" + pair.id + "' needs at least one document and summary sentence");
    return pair;
}

/// {"id": string, "summary": [string]}
inline SummaryRecord summary_from_json(const json& obj, const TokenizerConfig& tok = {}) {
    return {string_field(obj, "id"), sentence_list(obj, "summary", tok)};
}

inline json to_json(const ExtractionLabels& labels) {
    json k = json::array();
    for (const auto& row : labels.k) {
        json r = json::array();
        for (std::size_t idx : row)
            r.push_back(idx + 1);
        k.push_back(std::move(r));
    }
    return {{"id", labels.pair_id}, {"n", labels.n}, {"k", std::move(k)}, {"flags", labels.flags}};
}

inline ExtractionLabels labels_from_json(const json& obj) {
    ExtractionLabels labels;
    labels.pair_id = string_field(obj, "id");
    labels.n = field(obj, "n").get<std::size_t>();
    for (const auto& row : field(obj, "k")) {
        std::vector<std::size_t> r;
        for (const auto& idx : row) {
            const auto one_based = idx.get<std::size_t>();
            if (one_based == 0)
                throw Error(ErrorKind::parse, "label indices are 1-based");
            r.push_back(one_based - 1);
        }
        labels.k.push_back(std::move(r));
    }
    if (auto it = obj.find("flags"); it != obj.end())
        labels.flags = it->get<std::vector<std::string>>();
    return labels;
}

inline json to_json(const ParaphraserExample& ex) {
    return {{"id", ex.pair_id},
            {"j", ex.j + 1},
            {"input", join_tokens(ex.input.tokens)},
            {"target", join_tokens(ex.target.tokens)}};
}

inline json to_json(const OverlapScore& s) {
    return {{"wmd", number_or_inf(s.wmd)}, {"wms", s.wms}, {"degenerate", s.degenerate}};
}

/// {"id", "slots": [[{"text", "score"}, ...], ...]}
inline std::vector<std::vector<BeamCandidate>> slots_from_json(const json& obj, const TokenizerConfig& tok = {}) {
    const json& slots = field(obj, "slots");
    if (!slots.is_array())
        throw Error(ErrorKind::parse, "field \"slots\" must be an array");
    std::vector<std::vector<BeamCandidate>> out;
    for (const auto& slot : slots) {
        if (!slot.is_array())
            throw Error(ErrorKind::parse, "each slot must be an array of candidates");
        std::vector<BeamCandidate> cands;
        for (const auto& c : slot)
            cands.push_back({tokenize(string_field(c, "text"), tok), number_field(c, "score")});
        out.push_back(std::move(cands));
    }
    return out;
}

inline json to_json(const RerankResult& r, const std::string& id) {
    return {{"id", id}, {"chosen", r.chosen}, {"blocked_slots", r.blocked_slots}};
}

inline json to_json(const PRF& p) {
    return {{"precision", p.precision}, {"recall", p.recall}, {"f", p.f}};
}

inline json to_json(const RougeScores& r) {
    return {{"rouge1", to_json(r.rouge1)}, {"rouge2", to_json(r.rouge2)}, {"rougeL", to_json(r.rougeL)}};
}

inline json to_json(const CorpusReport& report) {
    json pairs = json::array();
    for (const auto& p : report.pairs)
        pairs.push_back({{"id", p.id},
                         {"rouge", to_json(p.rouge)},
                         {"wms", p.wms.value},
                         {"wms_x100", p.wms.value * 100.0},
                         {"wmd", number_or_inf(p.wms.wmd)},
                         {"degenerate", p.wms.degenerate}});
    return {{"pair_count", report.pair_count},
            {"means",
             {{"rouge", to_json(report.mean_rouge)},
              {"wms", report.mean_wms},
              {"wms_x100", report.mean_wms * 100.0}}},
            {"pairs", std::move(pairs)}};
}

/// {"id", "j"?, "generated": string, "sources": [string, string]}
inline AttributionInput attribution_from_json(const json& obj, const TokenizerConfig& tok = {}) {
    AttributionInput in;
    in.pair_id = string_field(obj, "id");
    if (auto it = obj.find("j"); it != obj.end()) {
        const auto j = it->get<std::size_t>();
        if (j == 0)
            throw Error(ErrorKind::parse, "field \"j\" is 1-based");
        in.j = j - 1;
    }
    in.generated = tokenize(string_field(obj, "generated"), tok);
    const auto sources = sentence_list(obj, "sources", tok);
    if (sources.size() != 2)
        throw Error(ErrorKind::input, "attribution needs exactly two source sentences");
    in.sources = {sources[0], sources[1]};
    return in;
}

inline json to_json(const AttributionRecord& r) {
    return {{"id", r.pair_id},
            {"j", r.j + 1},
            {"wmd_closer", number_or_inf(r.wmd_closer)},
            {"wmd_farther", number_or_inf(r.wmd_farther)},
            {"degenerate", r.degenerate}};
}

inline json error_record(ErrorKind kind, const std::string& message,
                         const std::optional<std::string>& id = std::nullopt, std::optional<std::size_t> line = {}) {
    json e = {{"error", message}, {"kind", to_string(kind)}};
    if (id)
        e["id"] = *id;
    if (line)
        e["line"] = *line;
    return e;
}

} // namespace semoverlap::io
