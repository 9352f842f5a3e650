// semoverlap: labeling, reward serving, scoring, analysis and reranking
// over JSON-lines corpora.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "run_config.hpp"
#include "semoverlap/io.hpp"
#include "semoverlap/semoverlap.hpp"

namespace {

using namespace semoverlap;
using cli::RunConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Pairs are labeled in fixed-size chunks so memory stays bounded on large
// corpora. The size does not depend on the worker count.
constexpr std::size_t kChunk = 1024;

struct Resources {
    EmbeddingTable table;
    std::optional<StopwordSet> stopwords;

    const StopwordSet* stop() const { return stopwords ? &*stopwords : nullptr; }
};

Resources load_resources(const RunConfig& cfg) {
    if (cfg.embeddings.empty())
        throw CLI::ValidationError("--embeddings", "an embedding file is required for this command");
    Resources r;
    r.table = load_embeddings(cfg.embeddings, cfg.embeddings_format, {cfg.limit, cfg.normalize});
    if (!cfg.no_stopwords)
        r.stopwords = cfg.stopwords.empty() ? english_stopwords() : load_stopwords(cfg.stopwords);
    return r;
}

json meta(const std::string& command, const RunConfig& cfg, const Resources* res) {
    json m = {{"command", command}, {"config", cfg.echo()}};
    if (res) {
        m["embeddings"] = {{"vocab", res->table.size()},
                           {"dim", res->table.dim()},
                           {"duplicates", res->table.duplicates()}};
    }
    return {{"meta", std::move(m)}};
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out);
    const auto path = (std::filesystem::path(cfg.out) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::io, "cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path);
    return in;
}

void report(const json& record) {
    std::cerr << record.dump() << '\n';
}

/// Calls fn(object, line_number) for each non-blank line. Lines that fail
/// to parse are reported and counted instead of aborting the run.
std::size_t for_each_record(const std::string& path, const std::function<void(const json&, std::size_t)>& fn) {
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0, failures = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            fn(io::parse_line(line), lineno);
        } catch (const Error& e) {
            report(io::error_record(e.kind(), path + ": " + e.what(), std::nullopt, lineno));
            ++failures;
        } catch (const json::exception& e) {
            report(io::error_record(ErrorKind::parse, path + ": " + e.what(), std::nullopt, lineno));
            ++failures;
        }
    }
    return failures;
}

/// Strict variant for inputs that must be read in full (score, analyze).
template <typename T, typename Parse>
std::vector<T> read_all(const std::string& path, Parse parse) {
    std::vector<T> out;
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.push_back(parse(io::parse_line(line)));
        } catch (const Error& e) {
            throw Error(e.kind(), path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const json::exception& e) {
            throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void summary_line(const std::string& command, std::size_t records, std::size_t failed) {
    report({{"summary", {{"command", command}, {"records", records}, {"failed", failed}}}});
}

int cmd_label(const RunConfig& cfg, const std::string& corpus_path) {
    const Resources res = load_resources(cfg);
    auto labels_out = open_out(cfg, "labels.jsonl");
    auto examples_out = open_out(cfg, "examples.jsonl");
    const std::string header = meta("label", cfg, &res).dump();
    labels_out << header << '\n';
    examples_out << header << '\n';

    const LabelConfig lc{cfg.n, res.stop(), cfg.prune};
    std::vector<CorpusPair> chunk;
    std::vector<std::size_t> chunk_lines;
    std::size_t total = 0, failed = 0;

    auto flush = [&] {
        const auto outcomes = label_corpus(chunk, res.table, lc, cfg.workers);
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto& o = outcomes[i];
            if (!o.ok()) {
                report(io::error_record(*o.error_kind, o.error_message, o.pair_id, chunk_lines[i]));
                ++failed;
                continue;
            }
            labels_out << io::to_json(*o.labels).dump() << '\n';
            for (const auto& ex : build_paraphraser_examples(chunk[i], *o.labels))
                examples_out << io::to_json(ex).dump() << '\n';
        }
        chunk.clear();
        chunk_lines.clear();
    };

    failed += for_each_record(corpus_path, [&](const json& obj, std::size_t lineno) {
        chunk.push_back(io::corpus_pair_from_json(obj));
        chunk_lines.push_back(lineno);
        ++total;
        if (chunk.size() == kChunk)
            flush();
    });
    flush();
    summary_line("label", total, failed);
    return failed == 0 ? kExitOk : kExitData;
}

json reward_one(const json& obj, const Resources& res, const RunConfig& cfg) {
    const auto gold = tokenize(io::string_field(obj, "gold"));
    const auto generated = tokenize(io::string_field(obj, "generated"));
    json out = io::to_json(reward(gold, generated, res.table, cfg.reward, res.stop()));
    if (auto it = obj.find("id"); it != obj.end())
        out["id"] = *it;
    return out;
}

int cmd_reward(const RunConfig& cfg) {
    const Resources res = load_resources(cfg);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(std::cin, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json out;
        try {
            const json obj = io::parse_line(line);
            if (obj.is_object() && obj.contains("batch")) {
                const json& batch = obj["batch"];
                if (!batch.is_array())
                    throw Error(ErrorKind::parse, "field \"batch\" must be an array");
                out["batch"] = json::array();
                for (const auto& item : batch)
                    out["batch"].push_back(reward_one(item, res, cfg));
                if (auto it = obj.find("id"); it != obj.end())
                    out["id"] = *it;
            } else {
                out = reward_one(obj, res, cfg);
            }
        } catch (const Error& e) {
            out = io::error_record(e.kind(), e.what(), std::nullopt, lineno);
        } catch (const json::exception& e) {
            out = io::error_record(ErrorKind::parse, e.what(), std::nullopt, lineno);
        }
        std::cout << out.dump() << '\n' << std::flush;
    }
    return kExitOk;
}

std::string csv_number(double v) {
    return std::isinf(v) ? "inf" : format_double(v);
}

int cmd_score(const RunConfig& cfg, const std::string& candidates, const std::string& references, bool csv) {
    const Resources res = load_resources(cfg);
    auto parse = [](const json& obj) { return io::summary_from_json(obj); };
    const auto cands = read_all<SummaryRecord>(candidates, parse);
    const auto refs = read_all<SummaryRecord>(references, parse);
    const CorpusReport rep = evaluate_corpus(cands, refs, res.table, res.stop(), cfg.workers);

    json doc = meta("score", cfg, &res);
    doc.update(io::to_json(rep));
    open_out(cfg, "report.json") << doc.dump(2) << '\n';

    if (csv) {
        auto out = open_out(cfg, "report.csv");
        out << "# " << meta("score", cfg, &res).dump() << '\n';
        out << "id,rouge1_f,rouge2_f,rougeL_f,wms,wms_x100,degenerate\n";
        for (const auto& p : rep.pairs)
            out << p.id << ',' << csv_number(p.rouge.rouge1.f) << ',' << csv_number(p.rouge.rouge2.f) << ','
                << csv_number(p.rouge.rougeL.f) << ',' << csv_number(p.wms.value) << ','
                << csv_number(p.wms.value * 100.0) << ',' << (p.wms.degenerate ? 1 : 0) << '\n';
        out << "mean," << csv_number(rep.mean_rouge.rouge1.f) << ',' << csv_number(rep.mean_rouge.rouge2.f) << ','
            << csv_number(rep.mean_rouge.rougeL.f) << ',' << csv_number(rep.mean_wms) << ','
            << csv_number(rep.mean_wms * 100.0) << ",\n";
    }
    return kExitOk;
}

CorpusPair document_from_json(const json& obj) {
    CorpusPair pair{io::string_field(obj, "id"), io::sentence_list(obj, "document", {}), {}};
    return pair;
}

int cmd_analyze(const RunConfig& cfg, const std::string& summaries, const std::string& documents,
                const std::string& attribution_path) {
    const Resources res = load_resources(cfg);
    const auto sums = read_all<SummaryRecord>(summaries, [](const json& o) { return io::summary_from_json(o); });
    const auto docs = read_all<CorpusPair>(documents, document_from_json);
    const AlphaProfile profile = alpha_profile(sums, docs, cfg.alpha, res.table, res.stop(), cfg.workers);

    json m = meta("analyze", cfg, &res);
    m["meta"]["profile"] = {{"sentence_count", profile.sentence_count},
                            {"skipped_pairs", profile.skipped_pairs},
                            {"skipped_sentences", profile.skipped_sentences}};
    m["meta"]["profile"]["gap"] = profile.gap ? json(*profile.gap) : json(nullptr);
    std::filesystem::create_directories(cfg.out);
    export_profile(profile, (std::filesystem::path(cfg.out) / "profile.csv").string(), m.dump());

    if (!attribution_path.empty()) {
        const auto inputs =
            read_all<AttributionInput>(attribution_path, [](const json& o) { return io::attribution_from_json(o); });
        const AttributionReport rep = attribution(inputs, res.table, res.stop(), cfg.workers);
        auto out = open_out(cfg, "attribution.jsonl");
        out << meta("analyze", cfg, &res).dump() << '\n';
        for (const auto& r : rep.records)
            out << io::to_json(r).dump() << '\n';
        out << json{{"summary",
                     {{"records", rep.records.size()},
                      {"count", rep.count},
                      {"mean_closer", rep.mean_closer},
                      {"mean_farther", rep.mean_farther}}}}
                   .dump()
            << '\n';
    }
    return kExitOk;
}

int cmd_rerank(const RunConfig& cfg, const std::string& slots_path) {
    auto out = open_out(cfg, "rerank.jsonl");
    out << meta("rerank", cfg, nullptr).dump() << '\n';
    std::size_t total = 0;
    const std::size_t failed = for_each_record(slots_path, [&](const json& obj, std::size_t) {
        const std::string id = io::string_field(obj, "id");
        try {
            out << io::to_json(rerank(io::slots_from_json(obj)), id).dump() << '\n';
        } catch (const Error& e) {
            throw Error(e.kind(), "'" + id + "': " + e.what());
        }
        ++total;
    });
    summary_line("rerank", total, failed);
    return failed == 0 ? kExitOk : kExitData;
}

int fail(ErrorKind kind, const std::string& message, int code) {
    report(io::error_record(kind, message));
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic-overlap toolkit: WMD labeling, rewards, scoring, analysis and reranking"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML config file with defaults for any flag")
        ->envname("SEMOVERLAP_CONFIG");

    RunConfig cfg;
    const std::map<std::string, EmbeddingFormat> formats{{"text", EmbeddingFormat::text},
                                                         {"binary", EmbeddingFormat::binary}};
    app.add_option("--embeddings", cfg.embeddings, "Embedding file");
    app.add_option("--embeddings-format", cfg.embeddings_format, "text or binary")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    app.add_option("--limit", cfg.limit, "Read at most this many embedding records");
    app.add_flag("--normalize", cfg.normalize, "L2-normalize embedding rows");
    app.add_option("--stopwords", cfg.stopwords, "Stopword file (default: built-in English list)");
    app.add_flag("--no-stopwords", cfg.no_stopwords, "Keep every token");
    app.add_option("--a", cfg.reward.a, "Reward parameter a (>= 0)");
    app.add_option("--b", cfg.reward.b, "Reward parameter b (> 0)");
    app.add_option("--n", cfg.n, "Document sentences extracted per summary sentence");
    app.add_option("--alpha", cfg.alpha, "Closest document sentences kept per summary sentence");
    app.add_option("--workers", cfg.workers, "Worker threads");
    bool no_prune = false;
    app.add_flag("--no-prune", no_prune, "Solve every transport problem exactly, skipping lower-bound pruning");
    app.add_option("--out", cfg.out, "Output directory");

    std::string corpus, candidates, references, summaries, documents, attribution_path, slots;
    bool csv = false;

    auto* label = app.add_subcommand("label", "Exemplary-extraction labels and paraphraser examples");
    label->add_option("corpus", corpus, "Corpus JSON lines")->required();
    auto* reward_cmd = app.add_subcommand("reward", "Stream rewards for {gold, generated} lines on stdin");
    auto* score = app.add_subcommand("score", "ROUGE and WMS report for candidate summaries");
    score->add_option("candidates", candidates, "Candidate summaries JSON lines")->required();
    score->add_option("references", references, "Reference summaries JSON lines")->required();
    score->add_flag("--csv", csv, "Also write report.csv");
    auto* analyze = app.add_subcommand("analyze", "Closest-alpha distance profile and source attribution");
    analyze->add_option("summaries", summaries, "Summaries JSON lines")->required();
    analyze->add_option("documents", documents, "Corpus JSON lines providing documents")->required();
    analyze->add_option("--attribution", attribution_path, "Generated sentences with their two sources");
    auto* rerank_cmd = app.add_subcommand("rerank", "Trigram-blocked selection over beam candidates");
    rerank_cmd->add_option("slots", slots, "Slots JSON lines")->required();

    try {
        app.parse(argc, argv);
        cfg.prune = !no_prune;
        cfg.validate();
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const Error& e) {
        return fail(ErrorKind::input, e.what(), kExitUsage);
    }

    try {
        if (*label)
            return cmd_label(cfg, corpus);
        if (*reward_cmd)
            return cmd_reward(cfg);
        if (*score)
            return cmd_score(cfg, candidates, references, csv);
        if (*analyze)
            return cmd_analyze(cfg, summaries, documents, attribution_path);
        if (*rerank_cmd)
            return cmd_rerank(cfg, slots);
    } catch (const CLI::ValidationError& e) {
        return fail(ErrorKind::input, e.what(), kExitUsage);
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), e.kind() == ErrorKind::internal ? kExitInternal : kExitData);
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(ErrorKind::io, e.what(), kExitData);
    } catch (const std::exception& e) {
        return fail(ErrorKind::internal, e.what(), kExitInternal);
    }
    return kExitUsage;
}
