#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/corpus.hpp"
#include "tweetscope/error.hpp"
#include "tweetscope/hash.hpp"

namespace tweetscope {

using DenseVector = std::vector<double>;

struct SparseEntry {
    std::size_t index;
    double weight;
    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// (index, weight) pairs with strictly increasing indices and no stored zeros.
struct SparseVector {
    std::vector<SparseEntry> entries;
    std::size_t dim = 0;

    bool empty() const { return entries.empty(); }
    DenseVector to_dense() const {
        DenseVector d(dim, 0.0);
        for (const auto& e : entries) d[e.index] = e.weight;
        return d;
    }
};

class Vocabulary {
public:
    Vocabulary() = default;

    /// Terms must be sorted and unique; doc_freq parallel to terms.
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq, std::size_t n_docs)
        : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs) {
        if (terms_.size() != doc_freq_.size()) throw DataError("vocabulary: terms/doc_freq length mismatch");
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i > 0 && !(terms_[i - 1] < terms_[i])) throw DataError("vocabulary: terms must be sorted and unique");
            if (doc_freq_[i] < 1 || doc_freq_[i] > n_docs_) {
                throw DataError(fmt::format("vocabulary: doc_freq of '{}' out of range", terms_[i]));
            }
            index_.emplace(terms_[i], i);
        }
    }

    std::size_t size() const { return terms_.size(); }
    std::size_t n_docs() const { return n_docs_; }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }

    std::optional<std::size_t> index_of(std::string_view term) const {
        auto it = index_.find(std::string(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// ln((1 + N) / (1 + df)) + 1
    double idf(std::size_t index) const {
        return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(doc_freq_[index]))) + 1.0;
    }

    nlohmann::json to_json() const { return {{"terms", terms_}, {"doc_freq", doc_freq_}, {"n_docs", n_docs_}}; }

    static Vocabulary from_json(const nlohmann::json& j) {
        return Vocabulary(j.at("terms").get<std::vector<std::string>>(),
                          j.at("doc_freq").get<std::vector<std::size_t>>(), j.at("n_docs").get<std::size_t>());
    }

    /// Content hash over the serialized form.
    std::string fingerprint() const { return sha256_hex(to_json().dump()); }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.terms_ == b.terms_ && a.doc_freq_ == b.doc_freq_ && a.n_docs_ == b.n_docs_;
    }

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> doc_freq_;
    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps terms with min_df <= df <= max_df_ratio * n_docs, indexed in
/// lexicographic order.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t min_df,
                                   double max_df_ratio) {
    if (docs.empty()) throw DataError("build_vocabulary: no documents");
    if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0)) {
        throw UsageError(fmt::format("build_vocabulary: max_df_ratio {} outside (0, 1]", max_df_ratio));
    }
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::vector<std::string> uniq(doc);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& t : uniq) ++df[std::move(t)];
    }
    const double max_df = max_df_ratio * static_cast<double>(docs.size());
    std::vector<std::string> terms;
    std::vector<std::size_t> freq;
    for (const auto& [term, count] : df) {
        if (count >= min_df && static_cast<double>(count) <= max_df) {
            terms.push_back(term);
            freq.push_back(count);
        }
    }
    if (terms.empty()) throw DataError("build_vocabulary: every term was filtered out (empty vocabulary)");
    return Vocabulary(std::move(terms), std::move(freq), docs.size());
}

inline Vocabulary build_vocabulary(const std::vector<CleanDocument>& docs, std::size_t min_df, double max_df_ratio) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(docs.size());
    for (const auto& d : docs) tokens.push_back(d.tokens);
    return build_vocabulary(tokens, min_df, max_df_ratio);
}

/// Raw-count tf times smoothed idf, L2-normalized. Out-of-vocabulary tokens
/// are ignored; an all-OOV document yields the empty vector.
inline SparseVector tfidf_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<std::size_t, double> counts;
    for (const auto& t : tokens) {
        if (auto idx = vocab.index_of(t)) counts[*idx] += 1.0;
    }
    SparseVector v;
    v.dim = vocab.size();
    double norm2 = 0.0;
    for (const auto& [idx, tf] : counts) {
        const double w = tf * vocab.idf(idx);
        v.entries.push_back({idx, w});
        norm2 += w * w;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& e : v.entries) e.weight *= inv;
    }
    return v;
}

inline SparseVector tfidf_vectorize(const CleanDocument& doc, const Vocabulary& vocab) {
    return tfidf_vectorize(doc.tokens, vocab);
}

struct EmbeddingTable {
    std::size_t dim = 0;
    std::vector<std::string> ids;  // file order
    std::unordered_map<std::string, DenseVector> vectors;

    const DenseVector& at(const std::string& id) const {
        auto it = vectors.find(id);
        if (it == vectors.end()) throw DataError(fmt::format("no embedding for document id \"{}\"", id));
        return it->second;
    }
};

/// Reads `dim=<d>` followed by `<id>\t<w1> ... <wd>` rows.
inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot open embeddings '{}'", path.string()));
    EmbeddingTable table;
    std::string line;
    if (!std::getline(in, line) || line.rfind("dim=", 0) != 0) {
        throw DataError(fmt::format("{}:1: expected header 'dim=<d>'", path.string()));
    }
    try {
        table.dim = std::stoul(line.substr(4));
    } catch (const std::exception&) {
        throw DataError(fmt::format("{}:1: bad dimension in header", path.string()));
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw DataError(fmt::format("{}:{}: expected '<id>\\t<values>'", path.string(), lineno));
        }
        std::string id = line.substr(0, tab);
        DenseVector v;
        v.reserve(table.dim);
        const char* p = line.c_str() + tab + 1;
        char* end = nullptr;
        while (true) {
            while (*p == ' ') ++p;
            if (*p == '\0') break;
            const double x = std::strtod(p, &end);
            if (end == p || !std::isfinite(x)) {
                throw DataError(fmt::format("{}:{}: bad number in embedding row", path.string(), lineno));
            }
            v.push_back(x);
            p = end;
        }
        if (v.size() != table.dim) {
            throw DataError(fmt::format("{}:{}: dimension mismatch (row has {}, header says {})", path.string(),
                                        lineno, v.size(), table.dim));
        }
        if (!table.vectors.emplace(id, std::move(v)).second) {
            throw DataError(fmt::format("{}:{}: duplicate id \"{}\"", path.string(), lineno, id));
        }
        table.ids.push_back(std::move(id));
    }
    return table;
}

/// Embedding ids that do not occur in `corpus_ids`; the vectors are kept.
inline std::vector<std::string> unmatched_embedding_ids(const EmbeddingTable& table,
                                                        const std::vector<std::string>& corpus_ids) {
    std::unordered_set<std::string> known(corpus_ids.begin(), corpus_ids.end());
    std::vector<std::string> out;
    for (const auto& id : table.ids) {
        if (!known.count(id)) out.push_back(id);
    }
    return out;
}

struct PcaModel {
    DenseVector mean;
    std::vector<DenseVector> components;  // k unit vectors of length d
    DenseVector explained_variance;       // nonincreasing

    std::size_t input_dim() const { return mean.size(); }
    std::size_t output_dim() const { return components.size(); }

    nlohmann::json to_json() const {
        return {{"mean", mean}, {"components", components}, {"explained_variance", explained_variance}};
    }
    static PcaModel from_json(const nlohmann::json& j) {
        return {j.at("mean").get<DenseVector>(), j.at("components").get<std::vector<DenseVector>>(),
                j.at("explained_variance").get<DenseVector>()};
    }
    std::string fingerprint() const { return sha256_hex(to_json().dump()); }
};

/// Principal components of the rows of `vectors`, via SVD of the centered
/// data (or the Gram-matrix eigenproblem when there are fewer rows than
/// columns). Each component's largest-magnitude entry is made positive.
inline PcaModel pca_fit(std::span<const DenseVector> vectors, std::size_t k) {
    const std::size_t n = vectors.size();
    if (n < 2) throw DataError("pca_fit: need at least 2 vectors");
    const std::size_t d = vectors[0].size();
    if (k < 1 || k > d || k > n - 1) {
        throw UsageError(fmt::format("pca_fit: k={} out of range (d={}, n={})", k, d, n));
    }
    Eigen::MatrixXd X(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (vectors[i].size() != d) throw DataError("pca_fit: vectors differ in dimensionality");
        for (std::size_t c = 0; c < d; ++c) X(i, c) = vectors[i][c];
    }
    if (!X.allFinite()) throw NumericError("pca_fit: non-finite input");
    const Eigen::RowVectorXd mu = X.colwise().mean();
    X.rowwise() -= mu;
    if (X.squaredNorm() == 0.0) throw NumericError("pca_fit: all vectors identical (zero variance)");

    Eigen::MatrixXd dirs(d, k);
    Eigen::VectorXd var(k);
    const double denom = static_cast<double>(n - 1);
    if (n >= d) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
        dirs = svd.matrixV().leftCols(k);
        var = svd.singularValues().head(k).array().square() / denom;
    } else {
        // X X^T = U S^2 U^T; right singular vectors are X^T u / s.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X * X.transpose());
        const Eigen::VectorXd evals = eig.eigenvalues().reverse();
        const Eigen::MatrixXd evecs = eig.eigenvectors().rowwise().reverse();
        Eigen::MatrixXd V = X.transpose() * evecs.leftCols(k);
        const double tol = 1e-12 * std::max(1.0, evals(0));
        for (std::size_t j = 0; j < k; ++j) {
            const double s2 = std::max(evals(static_cast<Eigen::Index>(j)), 0.0);
            var(static_cast<Eigen::Index>(j)) = s2 / denom;
            if (s2 > tol) V.col(static_cast<Eigen::Index>(j)) /= std::sqrt(s2);
        }
        // Null-space directions: complete to an orthonormal set.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto c = static_cast<Eigen::Index>(j);
            if (evals(c) <= tol) V.col(c) = Q.col(c);
        }
        dirs = V;
    }

    PcaModel model;
    model.mean.assign(mu.data(), mu.data() + d);
    model.explained_variance.assign(var.data(), var.data() + k);
    for (std::size_t j = 0; j < k; ++j) {
        Eigen::VectorXd c = dirs.col(static_cast<Eigen::Index>(j));
        Eigen::Index arg = 0;
        c.cwiseAbs().maxCoeff(&arg);
        if (c(arg) < 0) c = -c;
        model.components.emplace_back(c.data(), c.data() + d);
    }
    return model;
}

inline DenseVector pca_transform(const PcaModel& model, std::span<const double> v) {
    if (v.size() != model.input_dim()) {
        throw DataError(fmt::format("pca_transform: dimension mismatch ({} vs model {})", v.size(), model.input_dim()));
    }
    DenseVector out(model.output_dim(), 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const auto& c = model.components[j];
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - model.mean[i]) * c[i];
        out[j] = s;
    }
    return out;
}

inline std::vector<DenseVector> pca_transform(const PcaModel& model, std::span<const DenseVector> vs) {
    std::vector<DenseVector> out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(pca_transform(model, v));
    return out;
}

/// mean + sum_j y[j] * components[j]
inline DenseVector pca_inverse(const PcaModel& model, std::span<const double> y) {
    DenseVector x = model.mean;
    for (std::size_t j = 0; j < y.size() && j < model.output_dim(); ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[j] * model.components[j][i];
    }
    return x;
}

}  // namespace tweetscope
