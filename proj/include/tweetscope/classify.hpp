#pragma once

// Relevancy classification: stratified splitting, logistic regression and
// linear SVM trained by deterministic SGD, evaluation metrics, and k-fold
// cross-validation with in-fold SMOTE.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/balance.hpp"
#include "tweetscope/corpus.hpp"
#include "tweetscope/error.hpp"
#include "tweetscope/features.hpp"
#include "tweetscope/rng.hpp"

namespace tweetscope {

enum class ModelKind { LogisticRegression, LinearSvm };
enum class FeatureKind { Tfidf, EmbeddingPca };

inline std::string_view to_string(ModelKind k) { return k == ModelKind::LogisticRegression ? "logreg" : "svm"; }
inline std::string_view to_string(FeatureKind k) { return k == FeatureKind::Tfidf ? "tfidf" : "embeddings"; }

inline ModelKind parse_model_kind(std::string_view s) {
    if (s == "logreg" || s == "lr") return ModelKind::LogisticRegression;
    if (s == "svm") return ModelKind::LinearSvm;
    throw UsageError(fmt::format("unknown model kind '{}' (expected logreg|svm)", s));
}

inline FeatureKind parse_feature_kind(std::string_view s) {
    if (s == "tfidf") return FeatureKind::Tfidf;
    if (s == "embeddings") return FeatureKind::EmbeddingPca;
    throw UsageError(fmt::format("unknown feature kind '{}' (expected tfidf|embeddings)", s));
}

struct TrainingMeta {
    std::uint64_t seed = 0;
    int epochs = 0;
    double regularization = 0.0;
    std::string schedule;            // learning-rate schedule id
    std::vector<double> loss_trace;  // full objective after each epoch
    bool constant = false;           // single-class training data
};

struct LinearModel {
    DenseVector weights;
    double bias = 0.0;
    ModelKind kind = ModelKind::LogisticRegression;
    FeatureKind feature_kind = FeatureKind::Tfidf;
    TrainingMeta meta;
    std::map<std::string, std::string> fingerprints;  // e.g. "vocabulary" -> sha256
};

struct Prediction {
    Label label;
    double score;
    std::optional<double> probability;  // logistic regression only
};

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// score = w.x + b; Relevant iff score >= 0.
inline Prediction predict(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size()) {
        throw DataError(fmt::format("predict: feature dimension {} does not match model ({})", x.size(),
                                    model.weights.size()));
    }
    Prediction p;
    p.score = dot(model.weights, x) + model.bias;
    p.label = p.score >= 0.0 ? Label::Relevant : Label::Irrelevant;
    if (model.kind == ModelKind::LogisticRegression) p.probability = sigmoid(p.score);
    return p;
}

inline void check_finite(const std::vector<DenseVector>& X, std::string_view who) {
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (double v : X[i]) {
            if (!std::isfinite(v)) throw NumericError(fmt::format("{}: non-finite feature in row {}", who, i));
        }
    }
}

namespace detail {

inline void check_training_set(const std::vector<DenseVector>& X, std::span<const Label> y, std::string_view who) {
    if (X.empty()) throw DataError(fmt::format("{}: empty training set", who));
    if (X.size() != y.size()) throw DataError(fmt::format("{}: {} rows but {} labels", who, X.size(), y.size()));
    const std::size_t d = X[0].size();
    for (const auto& row : X) {
        if (row.size() != d) throw DataError(fmt::format("{}: rows differ in dimensionality", who));
    }
    check_finite(X, who);
}

inline std::optional<Label> single_class(std::span<const Label> y) {
    for (auto l : y) {
        if (l != y[0]) return std::nullopt;
    }
    return y[0];
}

inline double y01(Label l) { return l == Label::Relevant ? 1.0 : 0.0; }
inline double ypm(Label l) { return l == Label::Relevant ? 1.0 : -1.0; }

// Numerically stable ln(1 + e^z).
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline LinearModel constant_model(std::size_t d, Label l, ModelKind kind) {
    LinearModel m;
    m.weights.assign(d, 0.0);
    m.bias = l == Label::Relevant ? 1.0 : -1.0;
    m.kind = kind;
    m.meta.constant = true;
    return m;
}

}  // namespace detail

struct LossGrad {
    double loss = 0.0;
    DenseVector grad_w;
    double grad_b = 0.0;
};

/// Mean log-loss + (l2 / 2) ||w||^2 and its gradient. The bias is not
/// regularized.
inline LossGrad logreg_loss_grad(std::span<const double> w, double b, const std::vector<DenseVector>& X,
                                 std::span<const Label> y, double l2) {
    LossGrad out;
    out.grad_w.assign(w.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double z = dot(w, X[i]) + b;
        const double t = detail::y01(y[i]);
        out.loss += detail::softplus(z) - t * z;
        const double r = sigmoid(z) - t;
        for (std::size_t j = 0; j < w.size(); ++j) out.grad_w[j] += r * X[i][j];
        out.grad_b += r;
    }
    out.loss *= inv_n;
    out.grad_b *= inv_n;
    double w2 = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        out.grad_w[j] = out.grad_w[j] * inv_n + l2 * w[j];
        w2 += w[j] * w[j];
    }
    out.loss += 0.5 * l2 * w2;
    return out;
}

struct LogRegOptions {
    double l2 = 1e-4;
    int epochs = 100;
    double eta0 = 0.1;
    std::size_t batch_size = 1;  // n (or 0) gives full-batch gradient descent
    std::uint64_t seed = 0;
};

/// SGD on the regularized log-loss with step eta0 / (1 + t / T), where t
/// counts updates and T is the number of updates per epoch. Each epoch
/// visits the rows in a fresh Xoshiro256 permutation.
inline LinearModel train_logreg(const std::vector<DenseVector>& X, std::span<const Label> y,
                                const LogRegOptions& opt = {}) {
    detail::check_training_set(X, y, "train_logreg");
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();
    if (auto only = detail::single_class(y)) {
        auto m = detail::constant_model(d, *only, ModelKind::LogisticRegression);
        m.meta.seed = opt.seed;
        m.meta.regularization = opt.l2;
        m.meta.schedule = "constant-model";
        return m;
    }
    const std::size_t batch = (opt.batch_size == 0 || opt.batch_size > n) ? n : opt.batch_size;
    const std::size_t steps_per_epoch = (n + batch - 1) / batch;

    LinearModel m;
    m.kind = ModelKind::LogisticRegression;
    m.weights.assign(d, 0.0);
    m.meta.seed = opt.seed;
    m.meta.epochs = opt.epochs;
    m.meta.regularization = opt.l2;
    m.meta.schedule = fmt::format("eta0/(1+t/T);eta0={};T={};batch={}", opt.eta0, steps_per_epoch, batch);

    Xoshiro256 rng(opt.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    DenseVector gw(d);
    std::size_t t = 0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        if (batch < n) rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            std::fill(gw.begin(), gw.end(), 0.0);
            double gb = 0.0;
            for (std::size_t p = start; p < stop; ++p) {
                const auto& x = X[order[p]];
                const double r = sigmoid(dot(m.weights, x) + m.bias) - detail::y01(y[order[p]]);
                for (std::size_t j = 0; j < d; ++j) gw[j] += r * x[j];
                gb += r;
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            const double eta = opt.eta0 / (1.0 + static_cast<double>(t) / static_cast<double>(steps_per_epoch));
            for (std::size_t j = 0; j < d; ++j) m.weights[j] -= eta * (gw[j] * inv + opt.l2 * m.weights[j]);
            m.bias -= eta * gb * inv;
            ++t;
        }
        m.meta.loss_trace.push_back(logreg_loss_grad(m.weights, m.bias, X, y, opt.l2).loss);
    }
    for (double w : m.weights) {
        if (!std::isfinite(w)) throw NumericError("train_logreg: diverged to non-finite weights");
    }
    return m;
}

/// Mean hinge loss + (lambda / 2)(||w||^2 + b^2). The bias is handled as a
/// weight on a constant feature, so it shares the regularizer.
inline double svm_objective(std::span<const double> w, double b, const std::vector<DenseVector>& X,
                            std::span<const Label> y, double lambda) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        hinge += std::max(0.0, 1.0 - detail::ypm(y[i]) * (dot(w, X[i]) + b));
    }
    double w2 = b * b;
    for (double v : w) w2 += v * v;
    return hinge / static_cast<double>(X.size()) + 0.5 * lambda * w2;
}

struct SvmOptions {
    double lambda = 1e-4;
    int epochs = 50;
    std::uint64_t seed = 0;
};

/// Pegasos: stochastic subgradient steps of size 1 / (lambda t) followed by
/// projection onto the ball of radius 1 / sqrt(lambda).
inline LinearModel train_linear_svm(const std::vector<DenseVector>& X, std::span<const Label> y,
                                    const SvmOptions& opt = {}) {
    detail::check_training_set(X, y, "train_linear_svm");
    if (!(opt.lambda > 0.0)) throw UsageError("train_linear_svm: lambda must be positive");
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();
    if (auto only = detail::single_class(y)) {
        auto m = detail::constant_model(d, *only, ModelKind::LinearSvm);
        m.meta.seed = opt.seed;
        m.meta.regularization = opt.lambda;
        m.meta.schedule = "constant-model";
        return m;
    }

    LinearModel m;
    m.kind = ModelKind::LinearSvm;
    m.weights.assign(d, 0.0);
    m.meta.seed = opt.seed;
    m.meta.epochs = opt.epochs;
    m.meta.regularization = opt.lambda;
    m.meta.schedule = "pegasos:1/(lambda*t)";

    Xoshiro256 rng(opt.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const double radius2 = 1.0 / opt.lambda;
    std::size_t t = 0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (opt.lambda * static_cast<double>(t));
            const double yi = detail::ypm(y[i]);
            const bool violated = yi * (dot(m.weights, X[i]) + m.bias) < 1.0;
            const double shrink = 1.0 - eta * opt.lambda;
            for (std::size_t j = 0; j < d; ++j) m.weights[j] *= shrink;
            m.bias *= shrink;
            if (violated) {
                for (std::size_t j = 0; j < d; ++j) m.weights[j] += eta * yi * X[i][j];
                m.bias += eta * yi;
            }
            double norm2 = m.bias * m.bias;
            for (double w : m.weights) norm2 += w * w;
            if (norm2 > radius2) {
                const double s = std::sqrt(radius2 / norm2);
                for (double& w : m.weights) w *= s;
                m.bias *= s;
            }
        }
        m.meta.loss_trace.push_back(svm_objective(m.weights, m.bias, X, y, opt.lambda));
    }
    return m;
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

/// confusion[true][predicted], index 0 = Irrelevant, 1 = Relevant (positive).
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

struct Metrics {
    Confusion confusion{};
    double accuracy = 0.0;
    double precision = 0.0;    // support-weighted over both classes
    double recall = 0.0;       // support-weighted over both classes
    double f1 = 0.0;           // harmonic mean of `precision` and `recall`
    double f1_weighted = 0.0;  // support-weighted mean of per-class F1
    std::array<ClassMetrics, 2> per_class{};
    bool zero_division = false;  // some 0/0 cell was reported as 0

    const ClassMetrics& positive() const { return per_class[1]; }
};

inline double harmonic_mean(double p, double r) { return (p > 0.0 && r > 0.0) ? 2.0 * p * r / (p + r) : 0.0; }

inline Metrics metrics_from_confusion(const Confusion& c) {
    Metrics m;
    m.confusion = c;
    const std::size_t total = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    if (total == 0) throw DataError("evaluate: empty evaluation set");
    m.accuracy = static_cast<double>(c[0][0] + c[1][1]) / static_cast<double>(total);
    for (int k = 0; k < 2; ++k) {
        auto& pc = m.per_class[static_cast<std::size_t>(k)];
        const std::size_t tp = c[k][k];
        const std::size_t predicted = c[0][k] + c[1][k];
        pc.support = c[k][0] + c[k][1];
        if (predicted == 0) {
            m.zero_division = true;
        } else {
            pc.precision = static_cast<double>(tp) / static_cast<double>(predicted);
        }
        if (pc.support == 0) {
            m.zero_division = true;
        } else {
            pc.recall = static_cast<double>(tp) / static_cast<double>(pc.support);
        }
        pc.f1 = harmonic_mean(pc.precision, pc.recall);
        const double w = static_cast<double>(pc.support) / static_cast<double>(total);
        m.precision += w * pc.precision;
        m.recall += w * pc.recall;
        m.f1_weighted += w * pc.f1;
    }
    m.f1 = harmonic_mean(m.precision, m.recall);
    return m;
}

inline Metrics evaluate(const LinearModel& model, const std::vector<DenseVector>& X, std::span<const Label> y) {
    if (X.empty()) throw DataError("evaluate: empty evaluation set");
    if (X.size() != y.size()) throw DataError("evaluate: rows/labels length mismatch");
    Confusion c{};
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto p = predict(model, X[i]);
        ++c[static_cast<std::size_t>(y[i])][static_cast<std::size_t>(p.label)];
    }
    return metrics_from_confusion(c);
}

inline nlohmann::json to_json(const Metrics& m) {
    auto cls = [](const ClassMetrics& c) {
        return nlohmann::json{{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
    };
    return {{"confusion", {{m.confusion[0][0], m.confusion[0][1]}, {m.confusion[1][0], m.confusion[1][1]}}},
            {"confusion_order", {"irrelevant", "relevant"}},
            {"accuracy", m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"f1_weighted", m.f1_weighted},
            {"per_class", {{"irrelevant", cls(m.per_class[0])}, {"relevant", cls(m.per_class[1])}}},
            {"zero_division", m.zero_division}};
}

struct SplitSpec {
    double train_frac = 0.75;
    double test_frac = 0.15;
    double val_frac = 0.10;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> validation;
};

namespace detail {

// Largest-remainder apportionment of `total` items across groups of the
// given sizes, proportional to size.
inline std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& sizes) {
    const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    std::vector<std::size_t> out(sizes.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        const double exact = static_cast<double>(total) * static_cast<double>(sizes[g]) / static_cast<double>(n);
        out[g] = static_cast<std::size_t>(std::floor(exact));
        assigned += out[g];
        rem.emplace_back(-(exact - std::floor(exact)), g);
    }
    std::sort(rem.begin(), rem.end());
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[rem[i % rem.size()].second];
    return out;
}

inline std::size_t floor_count(double frac, std::size_t n) {
    return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
}

}  // namespace detail

/// Test and validation sizes are floor(frac * n); the remainder goes to
/// train. Stratified splits apportion each part across classes by largest
/// remainder. Index lists are returned sorted.
inline SplitIndices split(std::span<const Label> labels, const SplitSpec& spec) {
    if (std::abs(spec.train_frac + spec.test_frac + spec.val_frac - 1.0) > 1e-9 || spec.train_frac < 0 ||
        spec.test_frac < 0 || spec.val_frac < 0) {
        throw UsageError("split: fractions must be nonnegative and sum to 1");
    }
    const std::size_t n = labels.size();
    const std::size_t n_test = detail::floor_count(spec.test_frac, n);
    const std::size_t n_val = detail::floor_count(spec.val_frac, n);
    Xoshiro256 rng(spec.seed);
    SplitIndices out;

    std::vector<std::vector<std::size_t>> groups;
    if (spec.stratified) {
        groups.resize(2);
        for (std::size_t i = 0; i < n; ++i) groups[static_cast<std::size_t>(labels[i])].push_back(i);
        for (int c = 0; c < 2; ++c) {
            if (groups[static_cast<std::size_t>(c)].empty()) {
                throw DataError(fmt::format("split: class '{}' absent under stratification",
                                            to_string(static_cast<Label>(c))));
            }
        }
    } else {
        groups.emplace_back(n);
        std::iota(groups[0].begin(), groups[0].end(), 0);
    }
    std::vector<std::size_t> sizes;
    for (const auto& g : groups) sizes.push_back(g.size());
    const auto test_share = detail::apportion(n_test, sizes);
    const auto val_share = detail::apportion(n_val, sizes);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto& idx = groups[g];
        rng.shuffle(idx);
        const std::size_t nt = test_share[g], nv = val_share[g];
        out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(nt));
        out.validation.insert(out.validation.end(), idx.begin() + static_cast<std::ptrdiff_t>(nt),
                              idx.begin() + static_cast<std::ptrdiff_t>(nt + nv));
        out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(nt + nv), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    std::sort(out.validation.begin(), out.validation.end());
    return out;
}

/// Stratified k-fold assignment: each class is shuffled and dealt
/// round-robin across folds, continuing the deal from class to class.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const Label> labels, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw UsageError("cross_validate: need at least 2 folds");
    if (labels.size() < k) throw DataError(fmt::format("cross_validate: {} points for {} folds", labels.size(), k));
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    for (const auto& c : by_class) {
        if (!c.empty() && c.size() < k) {
            throw DataError(fmt::format("cross_validate: k={} exceeds a class count ({})", k, c.size()));
        }
    }
    Xoshiro256 rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t deal = 0;
    for (auto& c : by_class) {
        rng.shuffle(c);
        for (std::size_t i : c) folds[deal++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

struct SmoteOptions {
    bool enabled = true;
    double ratio = 1.0;  // minority target = ratio * majority count
    std::size_t k = 5;
};

/// Appends synthetic minority rows so the minority class reaches
/// ratio * majority. Returns the number of rows added.
inline std::size_t oversample_minority(std::vector<DenseVector>& X, std::vector<Label>& y, const SmoteOptions& opt,
                                       std::uint64_t seed, std::vector<std::string>* warnings = nullptr) {
    if (!opt.enabled) return 0;
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[static_cast<std::size_t>(y[i])].push_back(i);
    const std::size_t minority = by_class[0].size() <= by_class[1].size() ? 0 : 1;
    const auto& min_idx = by_class[minority];
    const auto& maj_idx = by_class[1 - minority];
    const auto target = static_cast<std::size_t>(std::llround(opt.ratio * static_cast<double>(maj_idx.size())));
    if (min_idx.size() < 2 || target <= min_idx.size()) return 0;
    std::vector<DenseVector> points;
    points.reserve(min_idx.size());
    for (std::size_t i : min_idx) points.push_back(X[i]);
    auto res = smote(points, target, opt.k, seed);
    if (warnings) warnings->insert(warnings->end(), res.warnings.begin(), res.warnings.end());
    for (auto& p : res.synthetic) {
        X.push_back(std::move(p));
        y.push_back(static_cast<Label>(minority));
    }
    return res.synthetic.size();
}

struct ClassifierOptions {
    ModelKind kind = ModelKind::LogisticRegression;
    LogRegOptions logreg;
    SvmOptions svm;
};

inline LinearModel train_classifier(const std::vector<DenseVector>& X, std::span<const Label> y,
                                    const ClassifierOptions& opt, std::uint64_t seed) {
    if (opt.kind == ModelKind::LogisticRegression) {
        auto o = opt.logreg;
        o.seed = seed;
        return train_logreg(X, y, o);
    }
    auto o = opt.svm;
    o.seed = seed;
    return train_linear_svm(X, y, o);
}

struct CvOptions {
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    ClassifierOptions classifier;
    SmoteOptions smote;
};

struct FoldData {
    std::vector<DenseVector> train;
    std::vector<DenseVector> test;
};

/// Builds per-fold feature matrices from (train rows, held-out rows), e.g.
/// to fit PCA on the training portion only.
using FoldFeaturizer = std::function<FoldData(std::span<const std::size_t>, std::span<const std::size_t>)>;

struct SummaryStat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1)
};

struct CvReport {
    std::vector<std::vector<std::size_t>> folds;
    std::vector<Metrics> fold_metrics;
    std::vector<std::size_t> synthetic_per_fold;
    SummaryStat accuracy, precision, recall, f1;
};

inline SummaryStat summarize(const std::vector<double>& xs) {
    SummaryStat s;
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

/// Stratified k-fold cross-validation. SMOTE, when enabled, touches only the
/// training portion of each fold. Metrics are averaged unweighted across
/// folds.
inline CvReport cross_validate(const std::vector<DenseVector>& X, std::span<const Label> y, const CvOptions& opt,
                               const FoldFeaturizer& featurize = {}) {
    if (X.size() != y.size()) throw DataError("cross_validate: rows/labels length mismatch");
    CvReport report;
    report.folds = stratified_folds(y, opt.folds, derive_seed(opt.seed, "cv-folds"));
    std::vector<double> acc, prec, rec, f1;
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const auto& held = report.folds[f];
        std::vector<std::size_t> train_idx;
        std::vector<bool> is_held(X.size(), false);
        for (std::size_t i : held) is_held[i] = true;
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (!is_held[i]) train_idx.push_back(i);
        }
        FoldData data;
        if (featurize) {
            data = featurize(train_idx, held);
        } else {
            for (std::size_t i : train_idx) data.train.push_back(X[i]);
            for (std::size_t i : held) data.test.push_back(X[i]);
        }
        std::vector<Label> y_train, y_test;
        for (std::size_t i : train_idx) y_train.push_back(y[i]);
        for (std::size_t i : held) y_test.push_back(y[i]);

        const std::string tag = fmt::format("fold-{}", f);
        report.synthetic_per_fold.push_back(
            oversample_minority(data.train, y_train, opt.smote, derive_seed(opt.seed, "smote-" + tag)));
        const auto model = train_classifier(data.train, y_train, opt.classifier, derive_seed(opt.seed, "train-" + tag));
        auto m = evaluate(model, data.test, y_test);
        acc.push_back(m.accuracy);
        prec.push_back(m.precision);
        rec.push_back(m.recall);
        f1.push_back(m.f1);
        report.fold_metrics.push_back(std::move(m));
    }
    report.accuracy = summarize(acc);
    report.precision = summarize(prec);
    report.recall = summarize(rec);
    report.f1 = summarize(f1);
    return report;
}

inline nlohmann::json to_json(const CvReport& r) {
    nlohmann::json folds = nlohmann::json::array();
    for (std::size_t f = 0; f < r.fold_metrics.size(); ++f) {
        auto j = to_json(r.fold_metrics[f]);
        j["fold"] = f;
        j["held_out"] = r.folds[f].size();
        j["synthetic_train"] = r.synthetic_per_fold[f];
        folds.push_back(std::move(j));
    }
    auto stat = [](const SummaryStat& s) { return nlohmann::json{{"mean", s.mean}, {"stddev", s.stddev}}; };
    return {{"folds", folds},
            {"summary",
             {{"accuracy", stat(r.accuracy)},
              {"precision", stat(r.precision)},
              {"recall", stat(r.recall)},
              {"f1", stat(r.f1)}}}};
}

struct LabeledDoc {
    std::string id;
    Prediction prediction;
};

struct BulkSummary {
    std::size_t n_relevant = 0;
    std::size_t n_irrelevant = 0;
    double relevant_fraction = 0.0;  // rounded to 3 decimals
};

struct BulkResult {
    std::vector<LabeledDoc> labeled;
    BulkSummary summary;
};

inline BulkResult bulk_label(const LinearModel& model, const std::vector<std::string>& ids,
                             const std::vector<DenseVector>& X) {
    if (ids.empty()) throw DataError("bulk_label: empty corpus");
    if (ids.size() != X.size()) throw DataError("bulk_label: ids/rows length mismatch");
    BulkResult r;
    r.labeled.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto p = predict(model, X[i]);
        ++(p.label == Label::Relevant ? r.summary.n_relevant : r.summary.n_irrelevant);
        r.labeled.push_back({ids[i], p});
    }
    r.summary.relevant_fraction =
        std::round(1000.0 * static_cast<double>(r.summary.n_relevant) / static_cast<double>(ids.size())) / 1000.0;
    return r;
}

inline nlohmann::json to_json(const LinearModel& m) {
    return {{"kind", to_string(m.kind)},
            {"feature_kind", to_string(m.feature_kind)},
            {"weights", m.weights},
            {"bias", m.bias},
            {"training_meta",
             {{"seed", m.meta.seed},
              {"epochs", m.meta.epochs},
              {"regularization", m.meta.regularization},
              {"schedule", m.meta.schedule},
              {"loss_trace", m.meta.loss_trace},
              {"constant", m.meta.constant}}},
            {"fingerprints", m.fingerprints}};
}

inline LinearModel linear_model_from_json(const nlohmann::json& j) {
    try {
        LinearModel m;
        m.kind = parse_model_kind(j.at("kind").get<std::string>());
        m.feature_kind = parse_feature_kind(j.at("feature_kind").get<std::string>());
        m.weights = j.at("weights").get<DenseVector>();
        m.bias = j.at("bias").get<double>();
        const auto& meta = j.at("training_meta");
        m.meta.seed = meta.at("seed").get<std::uint64_t>();
        m.meta.epochs = meta.at("epochs").get<int>();
        m.meta.regularization = meta.at("regularization").get<double>();
        m.meta.schedule = meta.at("schedule").get<std::string>();
        m.meta.loss_trace = meta.value("loss_trace", std::vector<double>{});
        m.meta.constant = meta.value("constant", false);
        m.fingerprints = j.at("fingerprints").get<std::map<std::string, std::string>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed model file: {}", e.what()));
    }
}

/// Refuses to apply a model to a feature space it was not trained on.
inline void check_fingerprints(const LinearModel& m, const std::map<std::string, std::string>& actual) {
    for (const auto& [name, expected] : m.fingerprints) {
        auto it = actual.find(name);
        if (it == actual.end() || it->second != expected) {
            throw DataError(fmt::format("model {} fingerprint mismatch (model {}, supplied {})", name,
                                        expected.substr(0, 12),
                                        it == actual.end() ? std::string("none") : it->second.substr(0, 12)));
        }
    }
}

}  // namespace tweetscope
