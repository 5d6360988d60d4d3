#pragma once

// Run configuration loaded from an INI file. Relative paths resolve against
// the directory holding the config file. See README for the full key list.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "tweetscope/classify.hpp"
#include "tweetscope/corpus.hpp"
#include "tweetscope/dates.hpp"
#include "tweetscope/error.hpp"
#include "tweetscope/topics.hpp"
#include "tweetscope/trends.hpp"

namespace tweetscope {

struct RunConfig {
    // [paths]
    std::filesystem::path corpus;        // labeled training corpus
    std::filesystem::path unlabeled;     // bulk corpus to classify; empty -> corpus
    std::filesystem::path stopwords;
    std::filesystem::path keywords;
    std::filesystem::path embeddings;
    std::filesystem::path timeline;
    std::filesystem::path out = "out";

    // [preprocess]
    PreprocessConfig preprocess;

    // [features]
    FeatureKind feature_kind = FeatureKind::Tfidf;
    std::size_t min_df = 2;
    double max_df = 0.95;
    std::size_t pca_components = 300;

    // [split]
    SplitSpec split;

    // [classifier], [smote]
    ClassifierOptions classifier;
    std::size_t folds = 5;
    SmoteOptions smote;

    // [lda], [coherence]
    LdaOptions lda;
    std::vector<std::size_t> K_range;  // empty -> fixed lda.K
    std::size_t lda_min_df = 5;
    double lda_max_df = 0.5;
    CoherenceMeasure coherence = CoherenceMeasure::UMass;
    std::size_t top_n = 10;

    // [trends]
    Date week_origin = kDefaultWeekOrigin;
    std::size_t top_m = 3;
    std::vector<std::string> themes;

    // [run]
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    std::filesystem::path base_dir = ".";
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw UsageError(fmt::format("config: {} must be a boolean, got '{}'", key, v));
}

}  // namespace detail

/// "2..8", "2,4,6" or a mix such as "2..4,8".
inline std::vector<std::size_t> parse_k_range(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : detail::split_list(s)) {
        try {
            const auto dots = part.find("..");
            if (dots == std::string::npos) {
                out.push_back(std::stoul(part));
            } else {
                const auto lo = std::stoul(part.substr(0, dots));
                const auto hi = std::stoul(part.substr(dots + 2));
                if (hi < lo) throw UsageError(fmt::format("config: empty K range '{}'", part));
                for (auto k = lo; k <= hi; ++k) out.push_back(k);
            }
        } catch (const std::logic_error&) {
            throw UsageError(fmt::format("config: cannot parse K range '{}'", s));
        }
    }
    return out;
}

inline RunConfig parse_config(const boost::property_tree::ptree& pt, const std::filesystem::path& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto v = pt.get_optional<std::string>(key)) return *v;
        return std::nullopt;
    };
    auto path = [&](const std::string& key, std::filesystem::path& dst) {
        if (auto v = get(key)) {
            std::filesystem::path p(*v);
            dst = p.is_absolute() ? p : base_dir / p;
        }
    };
    auto num = [&](const std::string& key, auto& dst) {
        if (auto v = get(key)) {
            try {
                using T = std::decay_t<decltype(dst)>;
                if constexpr (std::is_floating_point_v<T>) dst = std::stod(*v);
                else if constexpr (std::is_signed_v<T>) dst = static_cast<T>(std::stoll(*v));
                else {
                    if (!v->empty() && v->front() == '-') throw std::invalid_argument("negative");
                    dst = static_cast<T>(std::stoull(*v));
                }
            } catch (const std::logic_error&) {
                throw UsageError(fmt::format("config: {} must be numeric, got '{}'", key, *v));
            }
        }
    };
    auto flag = [&](const std::string& key, bool& dst) {
        if (auto v = get(key)) dst = detail::parse_bool(key, *v);
    };

    path("paths.corpus", c.corpus);
    path("paths.unlabeled", c.unlabeled);
    path("paths.stopwords", c.stopwords);
    path("paths.keywords", c.keywords);
    path("paths.embeddings", c.embeddings);
    path("paths.timeline", c.timeline);
    if (get("paths.out")) path("paths.out", c.out);
    else c.out = base_dir / "out";

    flag("preprocess.strip_urls", c.preprocess.strip_urls);
    flag("preprocess.strip_mentions_hashmarks", c.preprocess.strip_mentions_hashmarks);
    flag("preprocess.strip_non_ascii", c.preprocess.strip_non_ascii);
    num("preprocess.min_tokens", c.preprocess.min_tokens);
    if (auto v = get("preprocess.window_start")) c.preprocess.window_start = parse_date(*v);
    if (auto v = get("preprocess.window_end")) c.preprocess.window_end = parse_date(*v);

    if (auto v = get("features.kind")) c.feature_kind = parse_feature_kind(*v);
    num("features.min_df", c.min_df);
    num("features.max_df", c.max_df);
    num("features.pca_components", c.pca_components);

    num("split.train", c.split.train_frac);
    num("split.test", c.split.test_frac);
    num("split.validation", c.split.val_frac);

    if (auto v = get("classifier.model")) c.classifier.kind = parse_model_kind(*v);
    num("classifier.l2", c.classifier.logreg.l2);
    num("classifier.epochs", c.classifier.logreg.epochs);
    num("classifier.eta0", c.classifier.logreg.eta0);
    num("classifier.batch_size", c.classifier.logreg.batch_size);
    num("classifier.svm_lambda", c.classifier.svm.lambda);
    num("classifier.svm_epochs", c.classifier.svm.epochs);
    num("classifier.folds", c.folds);

    flag("smote.enabled", c.smote.enabled);
    num("smote.ratio", c.smote.ratio);
    num("smote.k", c.smote.k);

    num("lda.K", c.lda.K);
    if (auto v = get("lda.K_range")) c.K_range = parse_k_range(*v);
    if (auto v = get("lda.alpha")) {
        double a = 0.0;
        num("lda.alpha", a);
        c.lda.alpha = a;
    }
    num("lda.beta", c.lda.beta);
    num("lda.iterations", c.lda.iterations);
    num("lda.burn_in", c.lda.burn_in);
    num("lda.sample_lag", c.lda.sample_lag);
    num("lda.min_df", c.lda_min_df);
    num("lda.max_df", c.lda_max_df);

    if (auto v = get("coherence.measure")) c.coherence = parse_coherence(*v);
    num("coherence.top_n", c.top_n);

    if (auto v = get("trends.origin")) c.week_origin = parse_date(*v);
    num("trends.top_m", c.top_m);
    if (auto v = get("trends.themes")) c.themes = detail::split_list(*v);

    num("run.seed", c.seed);
    num("run.threads", c.threads);
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw UsageError(fmt::format("config file '{}' not found", path.string()));
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(path.string(), pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError(fmt::format("config: {}", e.what()));
    }
    return parse_config(pt, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// Checks cross-field constraints and that referenced input files exist.
inline void validate(const RunConfig& c) {
    auto must_exist = [](const std::filesystem::path& p, std::string_view what) {
        if (!p.empty() && !std::filesystem::exists(p)) {
            throw UsageError(fmt::format("{} file '{}' not found", what, p.string()));
        }
    };
    must_exist(c.corpus, "corpus");
    must_exist(c.unlabeled, "unlabeled corpus");
    must_exist(c.stopwords, "stopword");
    must_exist(c.keywords, "keyword");
    must_exist(c.embeddings, "embeddings");
    must_exist(c.timeline, "timeline");
    if (c.max_df <= 0.0 || c.max_df > 1.0 || c.lda_max_df <= 0.0 || c.lda_max_df > 1.0) {
        throw UsageError("config: max_df must lie in (0, 1]");
    }
    if (c.folds < 2) throw UsageError("config: classifier.folds must be >= 2");
    if (c.smote.ratio <= 0.0) throw UsageError("config: smote.ratio must be positive");
    if (c.threads < 1) throw UsageError("config: run.threads must be >= 1");
    for (auto K : c.K_range) {
        if (K < 2) throw UsageError("config: every K in lda.K_range must be >= 2");
    }
    if (!c.themes.empty() && c.K_range.empty() && c.themes.size() != c.lda.K) {
        throw UsageError(fmt::format("config: {} theme names for K={}", c.themes.size(), c.lda.K));
    }
}

}  // namespace tweetscope
