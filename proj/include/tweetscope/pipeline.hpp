#pragma once

// Pipeline stages behind the CLI subcommands. Each stage reads its inputs
// from the configured files or from earlier stages' outputs under
// RunConfig::out, so stages can run one at a time or chained by run_pipeline.
//
// Output layout under `out`:
//   clean/labeled.jsonl clean/unlabeled.jsonl preprocess_stats.json
//   model/model.json model/features.json model/metrics.json   cv.json
//   predict/labels.csv predict/relevant.jsonl predict/summary.json
//   sweep/coherence.csv sweep/sweep.json
//   topics/lda_model.json topics/topics.json topics/doc_topics.jsonl topics/distribution.json
//   trends/trend.csv trends/trend_counts.csv trends/alignment.md
//   report/...

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/balance.hpp"
#include "tweetscope/classify.hpp"
#include "tweetscope/config.hpp"
#include "tweetscope/corpus.hpp"
#include "tweetscope/features.hpp"
#include "tweetscope/report.hpp"
#include "tweetscope/rng.hpp"
#include "tweetscope/topics.hpp"
#include "tweetscope/trends.hpp"

namespace tweetscope {

namespace fs = std::filesystem;

namespace detail {

inline void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw UsageError(fmt::format("cannot create directory '{}': {}", p.string(), ec.message()));
}

inline void write_json(const fs::path& p, const nlohmann::json& j) {
    ensure_dir(p.parent_path());
    write_text_file(p, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw UsageError(fmt::format("cannot open '{}' (run the producing stage first)", p.string()));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("{}: malformed JSON: {}", p.string(), e.what()));
    }
}

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError(fmt::format("cannot open '{}'", p.string()));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void note(const std::string& msg) { fmt::print(stderr, "{}\n", msg); }

inline PreprocessConfig preprocess_config(const RunConfig& c) {
    PreprocessConfig p = c.preprocess;
    if (!c.stopwords.empty()) p.stopwords = load_term_list(c.stopwords);
    if (!c.keywords.empty()) p.collection_keywords = load_term_list(c.keywords);
    return p;
}

inline std::vector<Label> labels_of(const std::vector<CleanDocument>& docs) {
    std::vector<Label> y;
    y.reserve(docs.size());
    for (const auto& d : docs) {
        if (!d.label) throw DataError(fmt::format("document '{}' has no label", d.id));
        y.push_back(*d.label);
    }
    return y;
}

}  // namespace detail

/// Feature space fitted on training documents: a TF-IDF vocabulary or a
/// PCA projection of precomputed embeddings.
struct Featurizer {
    FeatureKind kind = FeatureKind::Tfidf;
    std::optional<Vocabulary> vocab;
    std::optional<PcaModel> pca;

    std::map<std::string, std::string> fingerprints() const {
        if (vocab) return {{"vocabulary", vocab->fingerprint()}};
        if (pca) return {{"pca", pca->fingerprint()}};
        return {};
    }

    nlohmann::json to_json() const {
        nlohmann::json j = {{"kind", std::string(to_string(kind))}};
        if (vocab) j["vocabulary"] = vocab->to_json();
        if (pca) j["pca"] = pca->to_json();
        return j;
    }

    static Featurizer from_json(const nlohmann::json& j) {
        try {
            Featurizer f;
            f.kind = parse_feature_kind(j.at("kind").get<std::string>());
            if (j.contains("vocabulary")) f.vocab = Vocabulary::from_json(j["vocabulary"]);
            if (j.contains("pca")) f.pca = PcaModel::from_json(j["pca"]);
            if ((f.kind == FeatureKind::Tfidf) != f.vocab.has_value()) throw DataError("features file: kind/content mismatch");
            return f;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("malformed features file: {}", e.what()));
        }
    }

    std::vector<DenseVector> transform(const std::vector<CleanDocument>& docs, const EmbeddingTable* table) const {
        std::vector<DenseVector> X;
        X.reserve(docs.size());
        if (kind == FeatureKind::Tfidf) {
            for (const auto& d : docs) X.push_back(tfidf_vectorize(d, *vocab).to_dense());
            return X;
        }
        if (!table) throw UsageError("embedding features need an embeddings file (paths.embeddings or --embeddings)");
        for (const auto& d : docs) X.push_back(pca_transform(*pca, table->at(d.id)));
        return X;
    }
};

inline std::vector<DenseVector> raw_embeddings(const std::vector<CleanDocument>& docs, const EmbeddingTable& table) {
    std::vector<DenseVector> X;
    X.reserve(docs.size());
    for (const auto& d : docs) X.push_back(table.at(d.id));
    return X;
}

inline Featurizer fit_featurizer(const RunConfig& c, const std::vector<CleanDocument>& train,
                                 const EmbeddingTable* table) {
    Featurizer f;
    f.kind = c.feature_kind;
    if (f.kind == FeatureKind::Tfidf) {
        f.vocab = build_vocabulary(train, c.min_df, c.max_df);
    } else {
        if (!table) throw UsageError("embedding features need an embeddings file (paths.embeddings or --embeddings)");
        const auto X = raw_embeddings(train, *table);
        f.pca = pca_fit(X, c.pca_components);
    }
    return f;
}

inline std::optional<EmbeddingTable> maybe_embeddings(const RunConfig& c) {
    if (c.feature_kind != FeatureKind::EmbeddingPca) return std::nullopt;
    if (c.embeddings.empty()) throw UsageError("features.kind = embeddings requires paths.embeddings");
    return load_embeddings(c.embeddings);
}

inline nlohmann::json cmd_preprocess(const RunConfig& c) {
    if (c.corpus.empty()) throw UsageError("paths.corpus is not set");
    const auto pcfg = detail::preprocess_config(c);
    const auto labeled = preprocess_corpus(load_corpus(c.corpus), pcfg);
    detail::ensure_dir(c.out / "clean");
    write_clean_jsonl(c.out / "clean" / "labeled.jsonl", labeled.docs);
    nlohmann::json stats = {{"labeled", to_json(labeled.stats)}};
    if (!c.unlabeled.empty()) {
        const auto unlabeled = preprocess_corpus(load_corpus(c.unlabeled), pcfg);
        write_clean_jsonl(c.out / "clean" / "unlabeled.jsonl", unlabeled.docs);
        stats["unlabeled"] = to_json(unlabeled.stats);
    }
    detail::write_json(c.out / "preprocess_stats.json", stats);
    return stats;
}

inline std::vector<CleanDocument> select(const std::vector<CleanDocument>& docs, const std::vector<std::size_t>& idx) {
    std::vector<CleanDocument> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(docs[i]);
    return out;
}

/// Stratified train/test/validation split, features fitted on the training
/// part only, SMOTE applied to the training part only.
inline nlohmann::json cmd_train(const RunConfig& c) {
    const auto docs = read_clean_jsonl(c.out / "clean" / "labeled.jsonl");
    const auto y = detail::labels_of(docs);
    SplitSpec spec = c.split;
    spec.seed = derive_seed(c.seed, "split");
    const auto parts = split(y, spec);
    const auto table = maybe_embeddings(c);
    const EmbeddingTable* tp = table ? &*table : nullptr;

    const auto train_docs = select(docs, parts.train);
    const auto feat = fit_featurizer(c, train_docs, tp);
    auto X_train = feat.transform(train_docs, tp);
    std::vector<Label> y_train;
    for (auto i : parts.train) y_train.push_back(y[i]);
    const std::vector<DenseVector> X_train_real = X_train;
    const std::vector<Label> y_train_real = y_train;

    std::vector<std::string> warnings;
    const auto n_synth = oversample_minority(X_train, y_train, c.smote, derive_seed(c.seed, "smote"), &warnings);
    auto model = train_classifier(X_train, y_train, c.classifier, derive_seed(c.seed, "train"));
    model.feature_kind = feat.kind;
    model.fingerprints = feat.fingerprints();

    auto eval_on = [&](const std::vector<std::size_t>& idx) -> nlohmann::json {
        if (idx.empty()) return nullptr;
        std::vector<Label> yy;
        for (auto i : idx) yy.push_back(y[i]);
        return to_json(evaluate(model, feat.transform(select(docs, idx), tp), yy));
    };
    nlohmann::json metrics = {
        {"model", std::string(to_string(model.kind))},
        {"features", std::string(to_string(feat.kind))},
        {"split",
         {{"train", parts.train.size()}, {"test", parts.test.size()}, {"validation", parts.validation.size()}}},
        {"smote", {{"enabled", c.smote.enabled}, {"ratio", c.smote.ratio}, {"k", c.smote.k}, {"synthetic", n_synth}}},
        {"warnings", warnings},
        {"train", to_json(evaluate(model, X_train_real, y_train_real))},
        {"test", eval_on(parts.test)},
        {"validation", eval_on(parts.validation)}};
    detail::write_json(c.out / "model" / "model.json", to_json(model));
    detail::write_json(c.out / "model" / "features.json", feat.to_json());
    detail::write_json(c.out / "model" / "metrics.json", metrics);
    for (const auto& w : warnings) detail::note("warning: " + w);
    return metrics;
}

inline nlohmann::json cmd_cv(const RunConfig& c) {
    const auto docs = read_clean_jsonl(c.out / "clean" / "labeled.jsonl");
    const auto y = detail::labels_of(docs);
    const auto table = maybe_embeddings(c);
    const EmbeddingTable* tp = table ? &*table : nullptr;
    CvOptions opt;
    opt.folds = c.folds;
    opt.seed = derive_seed(c.seed, "cv");
    opt.classifier = c.classifier;
    opt.smote = c.smote;
    auto featurize = [&](std::span<const std::size_t> tr, std::span<const std::size_t> te) {
        const auto train_docs = select(docs, {tr.begin(), tr.end()});
        const auto f = fit_featurizer(c, train_docs, tp);
        return FoldData{f.transform(train_docs, tp), f.transform(select(docs, {te.begin(), te.end()}), tp)};
    };
    const std::vector<DenseVector> unused(docs.size());
    auto report = to_json(cross_validate(unused, y, opt, featurize));
    report["model"] = std::string(to_string(c.classifier.kind));
    report["features"] = std::string(to_string(c.feature_kind));
    detail::write_json(c.out / "cv.json", report);
    return report;
}

/// RFC 4180 quoting when needed.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

/// Labels the unlabeled corpus (or the labeled one when no unlabeled corpus
/// was preprocessed) and writes the relevant-only subset for topic modeling.
inline nlohmann::json cmd_predict(const RunConfig& c, std::optional<fs::path> model_file = std::nullopt) {
    const fs::path model_path = model_file ? *model_file : c.out / "model" / "model.json";
    const auto model = linear_model_from_json(detail::read_json(model_path));
    const auto feat = Featurizer::from_json(detail::read_json(model_path.parent_path() / "features.json"));
    check_fingerprints(model, feat.fingerprints());
    if (model.feature_kind != feat.kind) throw DataError("model and features file disagree on feature kind");

    const fs::path unl = c.out / "clean" / "unlabeled.jsonl";
    const auto docs = read_clean_jsonl(fs::exists(unl) ? unl : c.out / "clean" / "labeled.jsonl");
    std::optional<EmbeddingTable> table;
    if (feat.kind == FeatureKind::EmbeddingPca) {
        if (c.embeddings.empty()) throw UsageError("model uses embeddings; set paths.embeddings");
        table = load_embeddings(c.embeddings);
    }
    std::vector<std::string> ids;
    for (const auto& d : docs) ids.push_back(d.id);
    const auto result = bulk_label(model, ids, feat.transform(docs, table ? &*table : nullptr));

    std::string csv = "id,label,score,probability\n";
    std::vector<CleanDocument> relevant;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& p = result.labeled[i].prediction;
        csv += fmt::format("{},{},{:.6f},{}\n", csv_field(ids[i]), to_string(p.label), p.score,
                           p.probability ? fmt::format("{:.6f}", *p.probability) : std::string());
        if (p.label == Label::Relevant) relevant.push_back(docs[i]);
    }
    detail::ensure_dir(c.out / "predict");
    detail::write_text_file(c.out / "predict" / "labels.csv", csv);
    write_clean_jsonl(c.out / "predict" / "relevant.jsonl", relevant);
    nlohmann::json summary = {{"documents", docs.size()},
                              {"relevant", result.summary.n_relevant},
                              {"irrelevant", result.summary.n_irrelevant},
                              {"relevant_fraction", result.summary.relevant_fraction}};
    detail::write_json(c.out / "predict" / "summary.json", summary);
    return summary;
}

/// Documents for topic modeling: predicted-relevant ones when available.
inline std::vector<CleanDocument> topic_documents(const RunConfig& c) {
    for (const auto& p : {c.out / "predict" / "relevant.jsonl", c.out / "clean" / "unlabeled.jsonl"}) {
        if (fs::exists(p)) return read_clean_jsonl(p);
    }
    auto docs = read_clean_jsonl(c.out / "clean" / "labeled.jsonl");
    std::erase_if(docs, [](const CleanDocument& d) { return d.label && *d.label == Label::Irrelevant; });
    return docs;
}

struct TopicInput {
    std::vector<CleanDocument> docs;  // aligned with corpus.docs
    LdaCorpus corpus;
    std::size_t dropped_empty = 0;
};

/// LDA vocabulary restriction; documents left without tokens are dropped.
inline TopicInput topic_input(const RunConfig& c) {
    TopicInput in;
    auto docs = topic_documents(c);
    if (docs.empty()) throw DataError("no documents available for topic modeling");
    const auto vocab = build_vocabulary(docs, c.lda_min_df, c.lda_max_df);
    auto corpus = make_lda_corpus(docs, vocab);
    in.corpus.terms = corpus.terms;
    in.corpus.vocab_fingerprint = corpus.vocab_fingerprint;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (corpus.docs[i].empty()) {
            ++in.dropped_empty;
            continue;
        }
        in.corpus.docs.push_back(std::move(corpus.docs[i]));
        in.docs.push_back(std::move(docs[i]));
    }
    return in;
}

inline std::vector<std::string> theme_names(const RunConfig& c, std::size_t K) {
    return c.themes.size() == K ? c.themes : default_theme_names(K);
}

inline nlohmann::json write_topic_artifacts(const RunConfig& c, const TopicInput& in, const LdaFit& fit) {
    const auto& m = fit.model;
    const auto names = theme_names(c, m.K);
    nlohmann::json topics = nlohmann::json::array();
    for (std::size_t k = 0; k < m.K; ++k) {
        auto s = top_words(m, k, std::min(c.top_n, m.V));
        s.theme = names[k];
        topics.push_back(to_json(s));
    }
    std::string lines;
    for (std::size_t d = 0; d < in.docs.size(); ++d) {
        lines += nlohmann::json{{"id", in.docs[d].id},
                                {"ts", format_rfc3339(in.docs[d].timestamp)},
                                {"dominant", fit.docs[d].dominant},
                                {"theta", fit.docs[d].theta}}
                     .dump();
        lines += '\n';
    }
    const auto dist = topic_distribution(fit.docs, m.K);
    nlohmann::json dist_j = nlohmann::json::array();
    for (std::size_t k = 0; k < m.K; ++k) {
        dist_j.push_back({{"topic", k}, {"theme", names[k]}, {"count", dist.counts[k]}, {"percent", dist.percent_rounded[k]}});
    }
    const auto coh = coherence(m, in.corpus, c.coherence, std::min(c.top_n, m.V));
    detail::write_json(c.out / "topics" / "lda_model.json", to_json(m));
    detail::write_json(c.out / "topics" / "topics.json", topics);
    detail::write_text_file(c.out / "topics" / "doc_topics.jsonl", lines);
    nlohmann::json summary = {{"K", m.K},
                              {"documents", in.docs.size()},
                              {"dropped_empty_after_vocabulary", in.dropped_empty},
                              {"vocabulary_size", m.V},
                              {"coherence", {{"measure", c.coherence == CoherenceMeasure::UMass ? "umass" : "npmi"},
                                             {"mean", coh.mean},
                                             {"per_topic", coh.per_topic}}},
                              {"distribution", dist_j}};
    detail::write_json(c.out / "topics" / "distribution.json", summary);
    return summary;
}

inline LdaOptions lda_options(const RunConfig& c, std::size_t K) {
    LdaOptions o = c.lda;
    o.K = K;
    o.seed = sweep_seed(c.seed, K);
    return o;
}

inline nlohmann::json cmd_topics(const RunConfig& c, std::optional<std::size_t> K = std::nullopt) {
    const auto in = topic_input(c);
    const auto fit = lda_fit(in.corpus, lda_options(c, K.value_or(c.lda.K)));
    return write_topic_artifacts(c, in, fit);
}

struct SweepOutcome {
    nlohmann::json summary;
    std::optional<LdaFit> selected_fit;
    std::optional<TopicInput> input;
};

inline std::vector<std::size_t> k_range(const RunConfig& c) {
    return c.K_range.empty() ? std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8} : c.K_range;
}

inline SweepOutcome run_sweep(const RunConfig& c, bool keep_selected) {
    SweepOutcome out;
    auto in = topic_input(c);
    LdaOptions base = c.lda;
    base.seed = c.seed;
    auto sweep = coherence_sweep(in.corpus, k_range(c), base, c.coherence, c.top_n, c.threads, keep_selected);
    detail::ensure_dir(c.out / "sweep");
    detail::write_text_file(c.out / "sweep" / "coherence.csv", coherence_csv(coherence_curve(sweep)));
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : sweep.curve) {
        nlohmann::json row = {{"K", p.K}, {"ok", p.ok}};
        if (p.ok) row["mean_coherence"] = p.mean_coherence;
        else row["error"] = p.error;
        curve.push_back(row);
        if (!p.ok) detail::note(fmt::format("warning: K={} failed: {}", p.K, p.error));
    }
    out.summary = {{"measure", c.coherence == CoherenceMeasure::UMass ? "umass" : "npmi"},
                   {"curve", curve},
                   {"selected_K", sweep.selected_K ? nlohmann::json(*sweep.selected_K) : nlohmann::json(nullptr)}};
    detail::write_json(c.out / "sweep" / "sweep.json", out.summary);
    if (!sweep.selected_K) throw NumericError("coherence sweep: every K failed");
    if (keep_selected) {
        for (auto& p : sweep.curve) {
            if (p.K == *sweep.selected_K) out.selected_fit = std::move(p.fit);
        }
        out.input = std::move(in);
    }
    return out;
}

inline nlohmann::json cmd_sweep(const RunConfig& c) { return run_sweep(c, false).summary; }

struct DocTopicRow {
    std::string id;
    Timestamp ts;
    DocTopics topics;
};

inline std::vector<DocTopicRow> read_doc_topics(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw UsageError(fmt::format("cannot open '{}' (run topics first)", p.string()));
    std::vector<DocTopicRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            DocTopicRow r;
            r.id = j.at("id").get<std::string>();
            r.ts = parse_rfc3339(j.at("ts").get<std::string>());
            r.topics.dominant = j.at("dominant").get<std::size_t>();
            r.topics.theta = j.at("theta").get<std::vector<double>>();
            rows.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("{}:{}: {}", p.string(), lineno, e.what()));
        }
    }
    return rows;
}

struct TrendOutcome {
    TrendMatrix trend;
    std::optional<std::vector<AlignmentRow>> alignment;
    std::vector<std::string> themes;
};

inline TrendOutcome compute_trends(const RunConfig& c) {
    const auto model = lda_model_from_json(detail::read_json(c.out / "topics" / "lda_model.json"));
    const auto rows = read_doc_topics(c.out / "topics" / "doc_topics.jsonl");
    std::vector<CleanDocument> stub;
    std::vector<std::size_t> dominant;
    for (const auto& r : rows) {
        CleanDocument d;
        d.id = r.id;
        d.timestamp = r.ts;
        stub.push_back(std::move(d));
        dominant.push_back(r.topics.dominant);
    }
    TrendOutcome out;
    out.themes = theme_names(c, model.K);
    out.trend = topic_trend(dominant, assign_weeks(stub, c.week_origin), model.K, c.week_origin);
    if (!c.timeline.empty()) out.alignment = align_events(out.trend, load_timeline(c.timeline), out.themes, c.top_m);
    return out;
}

inline nlohmann::json cmd_trends(const RunConfig& c) {
    const auto t = compute_trends(c);
    detail::ensure_dir(c.out / "trends");
    detail::write_text_file(c.out / "trends" / "trend.csv", trend_csv(t.trend));
    detail::write_text_file(c.out / "trends" / "trend_counts.csv", trend_counts_csv(t.trend));
    if (t.alignment) detail::write_text_file(c.out / "trends" / "alignment.md", alignment_markdown(*t.alignment));
    std::size_t empty = 0;
    for (bool e : t.trend.empty) empty += e;
    return {{"weeks", t.trend.weeks()}, {"empty_weeks", empty}, {"timeline_rows", t.alignment ? t.alignment->size() : 0}};
}

inline std::vector<CoherencePoint> read_coherence_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw UsageError(fmt::format("cannot open '{}'", p.string()));
    std::vector<CoherencePoint> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError(fmt::format("{}: malformed row '{}'", p.string(), line));
        CoherencePoint pt;
        pt.K = std::stoul(line.substr(0, comma));
        if (comma + 1 < line.size()) pt.mean = std::stod(line.substr(comma + 1));
        out.push_back(pt);
    }
    return out;
}

/// Assembles the report directory from whatever stage outputs exist.
inline nlohmann::json cmd_report(const RunConfig& c) {
    RunArtifacts a;
    a.run_info = {{"seed", c.seed}};
    if (fs::exists(c.out / "predict" / "labels.csv")) a.labels_csv = detail::read_text(c.out / "predict" / "labels.csv");
    if (fs::exists(c.out / "model" / "metrics.json")) {
        nlohmann::json m = {{"holdout", detail::read_json(c.out / "model" / "metrics.json")}};
        if (fs::exists(c.out / "cv.json")) m["cross_validation"] = detail::read_json(c.out / "cv.json");
        a.metrics = m;
    }
    if (fs::exists(c.out / "sweep" / "coherence.csv")) a.coherence = read_coherence_csv(c.out / "sweep" / "coherence.csv");
    if (fs::exists(c.out / "topics" / "lda_model.json")) {
        nlohmann::json topics = {{"topics", detail::read_json(c.out / "topics" / "topics.json")},
                                 {"summary", detail::read_json(c.out / "topics" / "distribution.json")}};
        a.topics = topics;
        const auto model = lda_model_from_json(detail::read_json(c.out / "topics" / "lda_model.json"));
        const auto rows = read_doc_topics(c.out / "topics" / "doc_topics.jsonl");
        std::vector<DocTopics> dt;
        for (const auto& r : rows) dt.push_back(r.topics);
        a.topic_map = intertopic_map(model, dt, theme_names(c, model.K));
        auto t = compute_trends(c);
        a.trend = std::move(t.trend);
        a.theme_names = t.themes;
        a.alignment = std::move(t.alignment);
        a.run_info["K"] = model.K;
    }
    return emit_run_report(a, c.out / "report");
}

inline nlohmann::json run_pipeline(const RunConfig& c) {
    nlohmann::json log;
    detail::note("preprocess");
    log["preprocess"] = cmd_preprocess(c);
    detail::note("train");
    log["train"] = cmd_train(c);
    detail::note("cv");
    log["cv"] = cmd_cv(c)["summary"];
    detail::note("predict");
    log["predict"] = cmd_predict(c);
    detail::note("sweep");
    auto sweep = run_sweep(c, true);
    log["sweep"] = sweep.summary;
    detail::note("topics");
    log["topics"] = write_topic_artifacts(c, *sweep.input, *sweep.selected_fit);
    detail::note("trends");
    log["trends"] = cmd_trends(c);
    detail::note("report");
    log["report"] = cmd_report(c);
    return log;
}

}  // namespace tweetscope
