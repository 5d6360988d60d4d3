// tweetscope command-line front end.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tweetscope/pipeline.hpp"

namespace ts = tweetscope;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> threads;
    std::string corpus, unlabeled, embeddings, timeline;
    std::string model, features, model_file;
    std::optional<std::size_t> folds;
    std::optional<double> smote_ratio;
    std::optional<std::size_t> smote_k;
    bool no_smote = false;
    std::optional<std::size_t> K;
    std::string k_range;
    std::string coherence;
};

ts::RunConfig resolve(const Overrides& o) {
    ts::RunConfig c;
    if (!o.config.empty()) c = ts::load_config(o.config);
    else c.out = "out";
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.out = o.out;
    if (o.threads) c.threads = *o.threads;
    if (!o.corpus.empty()) c.corpus = o.corpus;
    if (!o.unlabeled.empty()) c.unlabeled = o.unlabeled;
    if (!o.embeddings.empty()) c.embeddings = o.embeddings;
    if (!o.timeline.empty()) c.timeline = o.timeline;
    if (!o.model.empty()) c.classifier.kind = ts::parse_model_kind(o.model);
    if (!o.features.empty()) c.feature_kind = ts::parse_feature_kind(o.features);
    if (o.folds) c.folds = *o.folds;
    if (o.smote_ratio) c.smote.ratio = *o.smote_ratio;
    if (o.smote_k) c.smote.k = *o.smote_k;
    if (o.no_smote) c.smote.enabled = false;
    if (o.K) c.lda.K = *o.K;
    if (!o.k_range.empty()) c.K_range = ts::parse_k_range(o.k_range);
    if (!o.coherence.empty()) c.coherence = ts::parse_coherence(o.coherence);
    ts::validate(c);
    return c;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relevance filtering, topic modeling and weekly topic trends for keyword-collected posts"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("--config", o.config, "INI run configuration");
    app.add_option("--seed", o.seed, "master seed (u64)");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--threads", o.threads, "worker threads for the coherence sweep")->check(CLI::PositiveNumber);
    app.add_option("--corpus", o.corpus, "labeled corpus (JSONL or CSV)");
    app.add_option("--unlabeled", o.unlabeled, "corpus to classify (JSONL or CSV)");
    app.add_option("--embeddings", o.embeddings, "precomputed embeddings file");
    app.add_option("--timeline", o.timeline, "event timeline JSON");
    app.add_option("--model", o.model, "classifier: logreg | svm");
    app.add_option("--features", o.features, "features: tfidf | embeddings");
    app.add_option("--model-file", o.model_file, "model.json to use for predict");
    app.add_option("--folds", o.folds, "cross-validation folds");
    app.add_option("--smote-ratio", o.smote_ratio, "minority target as a fraction of the majority count");
    app.add_option("--smote-k", o.smote_k, "SMOTE nearest neighbours");
    app.add_flag("--no-smote", o.no_smote, "disable SMOTE");
    app.add_option("--K", o.K, "topic count for topics");
    app.add_option("--k-range", o.k_range, "topic counts for sweep, e.g. 2..8");
    app.add_option("--coherence", o.coherence, "coherence measure: umass | npmi");

    auto* preprocess = app.add_subcommand("preprocess", "clean, tokenize, stem and deduplicate the corpora");
    auto* train = app.add_subcommand("train", "split, oversample and train the relevance classifier");
    auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
    auto* predict = app.add_subcommand("predict", "label the corpus and keep the relevant documents");
    auto* topics = app.add_subcommand("topics", "fit LDA with a fixed topic count");
    auto* sweep = app.add_subcommand("sweep", "fit LDA over a range of topic counts and pick by coherence");
    auto* trends = app.add_subcommand("trends", "weekly topic percentages and event alignment");
    auto* report = app.add_subcommand("report", "write the report directory and manifest");
    auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const auto c = resolve(o);
        if (*preprocess) print(ts::cmd_preprocess(c));
        else if (*train) print(ts::cmd_train(c));
        else if (*cv) print(ts::cmd_cv(c));
        else if (*predict) print(ts::cmd_predict(c, o.model_file.empty() ? std::nullopt : std::optional<ts::fs::path>(o.model_file)));
        else if (*topics) print(ts::cmd_topics(c));
        else if (*sweep) print(ts::cmd_sweep(c));
        else if (*trends) print(ts::cmd_trends(c));
        else if (*report) print(ts::cmd_report(c));
        else if (*pipeline) print(ts::run_pipeline(c)["report"]);
    } catch (const ts::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
