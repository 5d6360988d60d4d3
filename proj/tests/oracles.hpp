#pragma once

// Independent reference implementations used by the tests. None of these
// call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Cyclic Jacobi eigensolver for a symmetric matrix. Returns eigenvalues in
/// descending order with matching eigenvectors (as columns of `vecs`).
struct Eigen {
    std::vector<double> values;
    Matrix vecs;  // vecs[i][j] = component i of eigenvector j
};

inline Eigen jacobi(Matrix A, int sweeps = 100) {
    const std::size_t n = A.size();
    Matrix V(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) V[i][i] = 1.0;
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) < 1e-300) continue;
                const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - sn * akq;
                    A[k][q] = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - sn * aqk;
                    A[q][k] = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - sn * vkq;
                    V[k][q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A[a][a] > A[b][b]; });
    Eigen e;
    e.vecs.assign(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        e.values.push_back(A[order[j]][order[j]]);
        for (std::size_t i = 0; i < n; ++i) e.vecs[i][j] = V[i][order[j]];
    }
    return e;
}

/// TF-IDF straight from the definition: vocabulary = terms with
/// min_df <= df <= max_ratio * N, weight = count * (ln((1+N)/(1+df)) + 1),
/// then L2 normalization.
inline std::vector<std::map<std::string, double>> tfidf(const std::vector<std::vector<std::string>>& docs,
                                                        std::size_t min_df, double max_ratio) {
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        std::set<std::string> u(d.begin(), d.end());
        for (const auto& t : u) df[t]++;
    }
    const double N = static_cast<double>(docs.size());
    std::vector<std::map<std::string, double>> out;
    for (const auto& d : docs) {
        std::map<std::string, double> w;
        for (const auto& t : d) {
            const auto f = df[t];
            if (f < min_df || static_cast<double>(f) > max_ratio * N) continue;
            w[t] += std::log((1.0 + N) / (1.0 + static_cast<double>(f))) + 1.0;
        }
        double norm = 0.0;
        for (const auto& [t, v] : w) norm += v * v;
        norm = std::sqrt(norm);
        for (auto& [t, v] : w) v /= norm;
        out.push_back(std::move(w));
    }
    return out;
}

/// Exhaustive k-NN by full stable sort on (distance, index).
inline std::vector<std::size_t> knn(const Matrix& pts, std::size_t q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == q) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < pts[i].size(); ++j) s += (pts[i][j] - pts[q][j]) * (pts[i][j] - pts[q][j]);
        d.emplace_back(s, i);
    }
    std::stable_sort(d.begin(), d.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
    return out;
}

/// Regularized mean log-loss written the textbook way.
inline double logloss(const std::vector<double>& w, double b, const Matrix& X, const std::vector<int>& y, double l2) {
    double s = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * X[i][j];
        const double p = 1.0 / (1.0 + std::exp(-z));
        s += y[i] ? -std::log(p) : -std::log(1.0 - p);
    }
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    return s / static_cast<double>(X.size()) + 0.5 * l2 * w2;
}

/// Central finite-difference gradient of `logloss` over (w, b).
inline std::vector<double> fd_gradient(const std::vector<double>& w, double b, const Matrix& X,
                                       const std::vector<int>& y, double l2, double h = 1e-5) {
    std::vector<double> g;
    for (std::size_t j = 0; j <= w.size(); ++j) {
        auto wp = w, wm = w;
        double bp = b, bm = b;
        if (j < w.size()) {
            wp[j] += h;
            wm[j] -= h;
        } else {
            bp += h;
            bm -= h;
        }
        g.push_back((logloss(wp, bp, X, y, l2) - logloss(wm, bm, X, y, l2)) / (2 * h));
    }
    return g;
}

/// counts[week][topic] by direct tally.
inline std::map<int, std::vector<std::size_t>> tally(const std::vector<std::size_t>& topic, const std::vector<int>& week,
                                                     std::size_t K) {
    std::map<int, std::vector<std::size_t>> t;
    for (std::size_t i = 0; i < topic.size(); ++i) {
        auto& row = t[week[i]];
        if (row.empty()) row.assign(K, 0);
        row[topic[i]]++;
    }
    return t;
}

inline double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0) h -= v * std::log(v);
    return h;
}

/// JS via the entropy identity H(m) - (H(p) + H(q)) / 2.
inline double js(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
    return entropy(m) - 0.5 * (entropy(p) + entropy(q));
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return d / std::sqrt(na * nb);
}

/// Planted LDA corpus generated with std::mt19937_64 and std::gamma_distribution.
struct Planted {
    std::vector<std::vector<double>> phi;  // K x V
    std::vector<std::vector<std::uint32_t>> docs;
    std::vector<std::vector<double>> theta;
    std::vector<std::string> terms;
};

/// K topics over K contiguous blocks of `block` terms; each topic puts
/// `in_block` of its mass on its own block and spreads the rest evenly.
inline Planted planted(std::size_t K, std::size_t block, std::size_t D, std::size_t len, double alpha, double in_block,
                       std::uint64_t seed) {
    Planted p;
    const std::size_t V = K * block;
    std::mt19937_64 eng(seed);
    for (std::size_t w = 0; w < V; ++w) p.terms.push_back("t" + std::string(w < 10 ? "0" : "") + std::to_string(w));
    p.phi.assign(K, std::vector<double>(V));
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t w = 0; w < V; ++w)
            p.phi[k][w] = (w / block == k) ? in_block / static_cast<double>(block)
                                           : (1.0 - in_block) / static_cast<double>(V - block);
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&](const std::vector<double>& probs) {
        double u = unif(eng), c = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            c += probs[i];
            if (u < c) return i;
        }
        return probs.size() - 1;
    };
    for (std::size_t d = 0; d < D; ++d) {
        std::vector<double> th(K);
        double s = 0.0;
        for (auto& x : th) {
            x = gamma(eng) + 1e-300;
            s += x;
        }
        for (auto& x : th) x /= s;
        std::vector<std::uint32_t> doc;
        for (std::size_t i = 0; i < len; ++i) doc.push_back(static_cast<std::uint32_t>(draw(p.phi[draw(th)])));
        p.docs.push_back(std::move(doc));
        p.theta.push_back(std::move(th));
    }
    return p;
}

/// Mean over planted rows of the best cosine against any recovered row.
inline double best_match_cosine(const std::vector<std::vector<double>>& planted_phi,
                                const std::vector<std::vector<double>>& recovered) {
    double total = 0.0;
    for (const auto& row : planted_phi) {
        double best = -1.0;
        for (const auto& r : recovered) best = std::max(best, cosine(row, r));
        total += best;
    }
    return total / static_cast<double>(planted_phi.size());
}

/// Two isotropic unit-variance Gaussian blobs centered at (-gap/2, 0) and
/// (+gap/2, 0). Labels are 1 for the right blob.
inline std::pair<Matrix, std::vector<int>> blobs(std::size_t n_left, std::size_t n_right, double gap,
                                                 std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g;
    Matrix X;
    std::vector<int> y;
    for (std::size_t i = 0; i < n_left + n_right; ++i) {
        const int label = i >= n_left;
        X.push_back({g(eng) + (label ? gap / 2 : -gap / 2), g(eng)});
        y.push_back(label);
    }
    return {X, y};
}

}  // namespace oracle
