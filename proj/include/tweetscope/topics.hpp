#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling, fold-in
// inference for unseen documents, topic summaries, UMass and NPMI
// coherence, and the coherence sweep used to choose the topic count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/corpus.hpp"
#include "tweetscope/error.hpp"
#include "tweetscope/features.hpp"
#include "tweetscope/rng.hpp"

namespace tweetscope {

using WordId = std::uint32_t;

/// Documents as word-id sequences over a fixed term list.
struct LdaCorpus {
    std::vector<std::string> terms;
    std::vector<std::vector<WordId>> docs;
    std::string vocab_fingerprint;

    std::size_t total_tokens() const {
        std::size_t n = 0;
        for (const auto& d : docs) n += d.size();
        return n;
    }
};

/// Maps tokens onto the vocabulary; out-of-vocabulary tokens are dropped.
/// Documents that lose every token stay in place as empty documents.
inline LdaCorpus make_lda_corpus(const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab) {
    LdaCorpus c;
    c.terms = vocab.terms();
    c.vocab_fingerprint = vocab.fingerprint();
    c.docs.reserve(docs.size());
    for (const auto& d : docs) {
        std::vector<WordId> ids;
        ids.reserve(d.size());
        for (const auto& t : d) {
            if (auto i = vocab.index_of(t)) ids.push_back(static_cast<WordId>(*i));
        }
        c.docs.push_back(std::move(ids));
    }
    return c;
}

inline LdaCorpus make_lda_corpus(const std::vector<CleanDocument>& docs, const Vocabulary& vocab) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(docs.size());
    for (const auto& d : docs) tokens.push_back(d.tokens);
    return make_lda_corpus(tokens, vocab);
}

struct LdaOptions {
    std::size_t K = 8;
    std::optional<double> alpha;  // default 50 / K
    double beta = 0.01;
    int iterations = 1000;
    int burn_in = 500;
    int sample_lag = 10;     // average every sample_lag-th post-burn-in sweep
    int loglik_every = 10;   // log-likelihood checkpoint spacing, in sweeps
    std::uint64_t seed = 0;

    double alpha_value() const { return alpha ? *alpha : 50.0 / static_cast<double>(K); }
};

/// Mutable sampler state; exposed read-only to sweep observers.
struct GibbsState {
    std::size_t K = 0, V = 0;
    std::vector<std::uint32_t> n_wk;  // V x K, row-major by word
    std::vector<std::uint32_t> n_k;
    std::vector<std::uint32_t> n_dk;  // D x K
    std::vector<std::vector<std::uint16_t>> z;

    std::uint32_t word_topic(std::size_t w, std::size_t k) const { return n_wk[w * K + k]; }
    std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return n_dk[d * K + k]; }
};

using SweepObserver = std::function<void(const GibbsState&, int sweep)>;

struct LdaModel {
    std::size_t K = 0, V = 0;
    double alpha = 0.0, beta = 0.0;
    std::vector<std::string> terms;
    std::vector<double> phi;  // K x V, row-major by topic
    std::vector<std::uint32_t> n_wk;
    std::vector<std::uint32_t> n_k;
    std::string vocab_fingerprint;
    std::uint64_t seed = 0;
    int iterations = 0;
    int burn_in = 0;
    std::vector<double> log_likelihood_trace;

    double phi_at(std::size_t k, std::size_t w) const { return phi[k * V + w]; }
    std::span<const double> phi_row(std::size_t k) const { return {phi.data() + k * V, V}; }
};

struct DocTopics {
    std::vector<double> theta;
    std::size_t dominant = 0;
    std::vector<std::uint16_t> assignments;  // final sweep, training documents only
    bool out_of_vocabulary = false;          // nothing to infer from; theta is uniform
};

struct LdaFit {
    LdaModel model;
    std::vector<DocTopics> docs;
};

/// argmax with lowest-index tie-break.
inline std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

/// log p(w | z) from the count tables, with phi integrated out.
inline double lda_log_likelihood(const GibbsState& s, double beta) {
    const double Vb = static_cast<double>(s.V) * beta;
    double ll = static_cast<double>(s.K) * (std::lgamma(Vb) - static_cast<double>(s.V) * std::lgamma(beta));
    for (std::size_t k = 0; k < s.K; ++k) {
        for (std::size_t w = 0; w < s.V; ++w) {
            const auto c = s.n_wk[w * s.K + k];
            if (c) ll += std::lgamma(c + beta) - std::lgamma(beta);
        }
        ll -= std::lgamma(s.n_k[k] + Vb) - std::lgamma(Vb);
    }
    return ll;
}

/// Collapsed Gibbs sampling. Each token's topic is resampled from
///   P(z = k | rest) ~ (n_dk + alpha) (n_wk + beta) / (n_k + V beta)
/// with the token's own assignment removed from the counts. phi and theta
/// are averaged over every sample_lag-th sweep after burn_in (the final
/// sweep always included).
inline LdaFit lda_fit(const LdaCorpus& corpus, const LdaOptions& opt, const SweepObserver& observer = {}) {
    const std::size_t K = opt.K;
    const std::size_t V = corpus.terms.size();
    const std::size_t D = corpus.docs.size();
    const double alpha = opt.alpha_value();
    const double beta = opt.beta;
    if (K < 2) throw UsageError(fmt::format("lda_fit: K must be >= 2 (got {})", K));
    if (K > 65535) throw UsageError("lda_fit: K too large");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw UsageError("lda_fit: alpha and beta must be positive");
    if (opt.iterations <= opt.burn_in || opt.burn_in < 0) throw UsageError("lda_fit: need iterations > burn_in >= 0");
    if (opt.sample_lag < 1 || opt.loglik_every < 1) throw UsageError("lda_fit: lags must be positive");
    const std::size_t total = corpus.total_tokens();
    if (D == 0 || total == 0) throw DataError("lda_fit: empty effective corpus");
    if (K > total) throw DataError(fmt::format("lda_fit: K={} exceeds token count {}", K, total));

    GibbsState s;
    s.K = K;
    s.V = V;
    s.n_wk.assign(V * K, 0);
    s.n_k.assign(K, 0);
    s.n_dk.assign(D * K, 0);
    s.z.resize(D);

    Xoshiro256 rng(opt.seed);
    for (std::size_t d = 0; d < D; ++d) {
        const auto& doc = corpus.docs[d];
        s.z[d].resize(doc.size());
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (doc[i] >= V) throw DataError("lda_fit: word id out of range");
            const auto k = static_cast<std::uint16_t>(rng.bounded(K));
            s.z[d][i] = k;
            ++s.n_wk[doc[i] * K + k];
            ++s.n_k[k];
            ++s.n_dk[d * K + k];
        }
    }

    LdaFit fit;
    auto& model = fit.model;
    std::vector<double> phi_acc(K * V, 0.0);
    std::vector<double> theta_acc(D * K, 0.0);
    int samples = 0;
    std::vector<double> p(K);
    std::vector<double> inv_denom(K);
    const double Vb = static_cast<double>(V) * beta;

    for (int sweep = 1; sweep <= opt.iterations; ++sweep) {
        for (std::size_t k = 0; k < K; ++k) inv_denom[k] = 1.0 / (s.n_k[k] + Vb);
        for (std::size_t d = 0; d < D; ++d) {
            const auto& doc = corpus.docs[d];
            std::uint32_t* ndk = &s.n_dk[d * K];
            for (std::size_t i = 0; i < doc.size(); ++i) {
                const WordId w = doc[i];
                std::uint32_t* nwk = &s.n_wk[w * K];
                const std::uint16_t old = s.z[d][i];
                --nwk[old];
                --s.n_k[old];
                --ndk[old];
                inv_denom[old] = 1.0 / (s.n_k[old] + Vb);
                double cum = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    cum += (ndk[k] + alpha) * (nwk[k] + beta) * inv_denom[k];
                    p[k] = cum;
                }
                const double u = rng.uniform() * cum;
                std::size_t k = 0;
                while (k + 1 < K && p[k] <= u) ++k;
                const auto nk = static_cast<std::uint16_t>(k);
                s.z[d][i] = nk;
                ++nwk[nk];
                ++s.n_k[nk];
                ++ndk[nk];
                inv_denom[nk] = 1.0 / (s.n_k[nk] + Vb);
            }
        }
        if (observer) observer(s, sweep);
        if (sweep % opt.loglik_every == 0) model.log_likelihood_trace.push_back(lda_log_likelihood(s, beta));
        if (sweep > opt.burn_in && (opt.iterations - sweep) % opt.sample_lag == 0) {
            ++samples;
            for (std::size_t k = 0; k < K; ++k) {
                const double inv = 1.0 / (s.n_k[k] + Vb);
                for (std::size_t w = 0; w < V; ++w) phi_acc[k * V + w] += (s.n_wk[w * K + k] + beta) * inv;
            }
            const double Ka = static_cast<double>(K) * alpha;
            for (std::size_t d = 0; d < D; ++d) {
                const double inv = 1.0 / (static_cast<double>(corpus.docs[d].size()) + Ka);
                for (std::size_t k = 0; k < K; ++k) theta_acc[d * K + k] += (s.n_dk[d * K + k] + alpha) * inv;
            }
        }
    }

    model.K = K;
    model.V = V;
    model.alpha = alpha;
    model.beta = beta;
    model.terms = corpus.terms;
    model.vocab_fingerprint = corpus.vocab_fingerprint;
    model.seed = opt.seed;
    model.iterations = opt.iterations;
    model.burn_in = opt.burn_in;
    model.n_wk = s.n_wk;
    model.n_k = s.n_k;
    model.phi.resize(K * V);
    for (std::size_t i = 0; i < phi_acc.size(); ++i) model.phi[i] = phi_acc[i] / samples;

    fit.docs.resize(D);
    for (std::size_t d = 0; d < D; ++d) {
        auto& dt = fit.docs[d];
        dt.theta.resize(K);
        for (std::size_t k = 0; k < K; ++k) dt.theta[k] = theta_acc[d * K + k] / samples;
        dt.dominant = argmax(dt.theta);
        dt.assignments = s.z[d];
        dt.out_of_vocabulary = corpus.docs[d].empty();
    }
    return fit;
}

/// Fold-in inference: samples topics for the new document's tokens with the
/// model's word-topic counts held fixed, averaging theta over the second
/// half of the sweeps.
inline DocTopics lda_infer(const LdaModel& model, const std::vector<WordId>& doc, int iterations,
                           std::uint64_t seed) {
    const std::size_t K = model.K;
    DocTopics out;
    if (doc.empty()) {
        out.theta.assign(K, 1.0 / static_cast<double>(K));
        out.out_of_vocabulary = true;
        return out;
    }
    if (iterations < 1) throw UsageError("lda_infer: iterations must be positive");
    const double Vb = static_cast<double>(model.V) * model.beta;
    std::vector<double> inv_denom(K);
    for (std::size_t k = 0; k < K; ++k) inv_denom[k] = 1.0 / (model.n_k[k] + Vb);

    Xoshiro256 rng(seed);
    std::vector<std::uint16_t> z(doc.size());
    std::vector<std::uint32_t> ndk(K, 0);
    for (std::size_t i = 0; i < doc.size(); ++i) {
        if (doc[i] >= model.V) throw DataError("lda_infer: word id out of range");
        z[i] = static_cast<std::uint16_t>(rng.bounded(K));
        ++ndk[z[i]];
    }
    std::vector<double> p(K), acc(K, 0.0);
    const int burn = iterations / 2;
    int samples = 0;
    const double norm = 1.0 / (static_cast<double>(doc.size()) + static_cast<double>(K) * model.alpha);
    for (int sweep = 1; sweep <= iterations; ++sweep) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            --ndk[z[i]];
            const std::uint32_t* nwk = &model.n_wk[doc[i] * K];
            double cum = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                cum += (ndk[k] + model.alpha) * (nwk[k] + model.beta) * inv_denom[k];
                p[k] = cum;
            }
            const double u = rng.uniform() * cum;
            std::size_t k = 0;
            while (k + 1 < K && p[k] <= u) ++k;
            z[i] = static_cast<std::uint16_t>(k);
            ++ndk[k];
        }
        if (sweep > burn) {
            ++samples;
            for (std::size_t k = 0; k < K; ++k) acc[k] += (ndk[k] + model.alpha) * norm;
        }
    }
    out.theta.resize(K);
    for (std::size_t k = 0; k < K; ++k) out.theta[k] = acc[k] / samples;
    out.dominant = argmax(out.theta);
    return out;
}

inline DocTopics lda_infer(const LdaModel& model, const std::vector<std::string>& tokens, int iterations,
                           std::uint64_t seed) {
    std::vector<WordId> ids;
    for (const auto& t : tokens) {
        auto it = std::lower_bound(model.terms.begin(), model.terms.end(), t);
        if (it != model.terms.end() && *it == t) ids.push_back(static_cast<WordId>(it - model.terms.begin()));
    }
    return lda_infer(model, ids, iterations, seed);
}

struct TopicSummary {
    std::size_t topic = 0;
    std::vector<std::pair<std::string, double>> top_terms;
    std::string theme;
};

/// Word ids of topic k ordered by phi descending, ties lexicographic.
inline std::vector<WordId> ranked_words(const LdaModel& model, std::size_t k, std::size_t n) {
    if (k >= model.K) throw UsageError(fmt::format("top_words: topic {} out of range (K={})", k, model.K));
    if (n > model.V) throw UsageError(fmt::format("top_words: n={} exceeds vocabulary size {}", n, model.V));
    std::vector<WordId> ids(model.V);
    std::iota(ids.begin(), ids.end(), 0);
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(), [&](WordId a, WordId b) {
        const double pa = model.phi_at(k, a), pb = model.phi_at(k, b);
        if (pa != pb) return pa > pb;
        return model.terms[a] < model.terms[b];
    });
    ids.resize(n);
    return ids;
}

inline TopicSummary top_words(const LdaModel& model, std::size_t k, std::size_t n = 10) {
    TopicSummary s;
    s.topic = k;
    for (WordId w : ranked_words(model, k, n)) s.top_terms.emplace_back(model.terms[w], model.phi_at(k, w));
    return s;
}

inline nlohmann::json to_json(const TopicSummary& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [t, p] : s.top_terms) terms.push_back({{"term", t}, {"probability", p}});
    nlohmann::json j = {{"topic", s.topic}, {"terms", terms}};
    if (!s.theme.empty()) j["theme"] = s.theme;
    return j;
}

struct CoherenceResult {
    std::vector<double> per_topic;
    double mean = 0.0;
};

enum class CoherenceMeasure { UMass, Npmi };

inline CoherenceMeasure parse_coherence(std::string_view s) {
    if (s == "umass") return CoherenceMeasure::UMass;
    if (s == "npmi") return CoherenceMeasure::Npmi;
    throw UsageError(fmt::format("unknown coherence measure '{}' (expected umass|npmi)", s));
}

namespace detail {

inline CoherenceResult finish(std::vector<double> per_topic) {
    CoherenceResult r;
    r.per_topic = std::move(per_topic);
    r.mean = std::accumulate(r.per_topic.begin(), r.per_topic.end(), 0.0) / static_cast<double>(r.per_topic.size());
    return r;
}

// Bitmask of which of `words` (at most 64) occur in `tokens`.
inline std::uint64_t presence(std::span<const WordId> tokens, std::span<const WordId> words) {
    std::uint64_t mask = 0;
    for (WordId t : tokens) {
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (words[i] == t) mask |= (std::uint64_t{1} << i);
        }
    }
    return mask;
}

}  // namespace detail

/// UMass coherence over each topic's top_n words (ordered by phi):
///   sum_{i >= 2} sum_{j < i} ln((D(w_i, w_j) + 1) / D(w_j))
/// with D counting documents of `corpus` that contain the words.
inline CoherenceResult umass_coherence(const LdaModel& model, const LdaCorpus& corpus, std::size_t top_n = 10) {
    if (top_n > 64) throw UsageError("coherence: top_n is limited to 64");
    top_n = std::min(top_n, model.V);
    std::vector<double> scores;
    for (std::size_t k = 0; k < model.K; ++k) {
        const auto words = ranked_words(model, k, top_n);
        std::vector<std::size_t> df(top_n, 0);
        std::vector<std::size_t> co(top_n * top_n, 0);
        for (const auto& doc : corpus.docs) {
            const std::uint64_t m = detail::presence(doc, words);
            if (!m) continue;
            for (std::size_t i = 0; i < top_n; ++i) {
                if (!(m >> i & 1)) continue;
                ++df[i];
                for (std::size_t j = 0; j < i; ++j) {
                    if (m >> j & 1) ++co[i * top_n + j];
                }
            }
        }
        double score = 0.0;
        for (std::size_t i = 1; i < top_n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (df[j] == 0) {
                    throw DataError(fmt::format("umass_coherence: term '{}' has zero document frequency",
                                                model.terms[words[j]]));
                }
                score += std::log((static_cast<double>(co[i * top_n + j]) + 1.0) / static_cast<double>(df[j]));
            }
        }
        scores.push_back(score);
    }
    return detail::finish(std::move(scores));
}

/// NPMI between two words given boolean-window probabilities.
inline double npmi(double p_ij, double p_i, double p_j, double eps = 1e-12) {
    if (p_ij >= 1.0) return 1.0;
    return std::log((p_ij + eps) / (p_i * p_j)) / -std::log(p_ij + eps);
}

/// Sliding-window NPMI, averaged over all top-word pairs of each topic.
/// Documents no longer than `window` count as a single window.
inline CoherenceResult npmi_coherence(const LdaModel& model, const LdaCorpus& corpus, std::size_t top_n = 10,
                                      std::size_t window = 10) {
    if (top_n > 64) throw UsageError("coherence: top_n is limited to 64");
    if (window < 1) throw UsageError("npmi_coherence: window must be positive");
    top_n = std::min(top_n, model.V);
    std::vector<double> scores;
    for (std::size_t k = 0; k < model.K; ++k) {
        const auto words = ranked_words(model, k, top_n);
        std::vector<std::size_t> wc(top_n, 0);
        std::vector<std::size_t> co(top_n * top_n, 0);
        std::size_t n_windows = 0;
        auto tally = [&](std::uint64_t m) {
            ++n_windows;
            for (std::size_t i = 0; i < top_n; ++i) {
                if (!(m >> i & 1)) continue;
                ++wc[i];
                for (std::size_t j = 0; j < i; ++j) {
                    if (m >> j & 1) ++co[i * top_n + j];
                }
            }
        };
        for (const auto& doc : corpus.docs) {
            if (doc.empty()) continue;
            if (doc.size() <= window) {
                tally(detail::presence(doc, words));
                continue;
            }
            for (std::size_t s = 0; s + window <= doc.size(); ++s) {
                tally(detail::presence(std::span<const WordId>(doc).subspan(s, window), words));
            }
        }
        if (n_windows == 0) throw DataError("npmi_coherence: corpus has no windows");
        double sum = 0.0;
        std::size_t pairs = 0;
        const double nw = static_cast<double>(n_windows);
        for (std::size_t i = 1; i < top_n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (wc[i] == 0 || wc[j] == 0) {
                    throw DataError("npmi_coherence: a top word never occurs in the reference corpus");
                }
                sum += npmi(static_cast<double>(co[i * top_n + j]) / nw, static_cast<double>(wc[i]) / nw,
                            static_cast<double>(wc[j]) / nw);
                ++pairs;
            }
        }
        scores.push_back(pairs ? sum / static_cast<double>(pairs) : 0.0);
    }
    return detail::finish(std::move(scores));
}

inline CoherenceResult coherence(const LdaModel& model, const LdaCorpus& corpus, CoherenceMeasure measure,
                                 std::size_t top_n = 10, std::size_t window = 10) {
    return measure == CoherenceMeasure::UMass ? umass_coherence(model, corpus, top_n)
                                              : npmi_coherence(model, corpus, top_n, window);
}

struct SweepPoint {
    std::size_t K = 0;
    double mean_coherence = 0.0;
    bool ok = false;
    std::string error;
    std::optional<LdaFit> fit;
};

struct SweepResult {
    std::vector<SweepPoint> curve;
    std::optional<std::size_t> selected_K;
};

/// Seed for the fit at topic count K.
inline std::uint64_t sweep_seed(std::uint64_t master, std::size_t K) {
    return derive_seed(master, fmt::format("lda-K{}", K));
}

/// Fits one model per K (seed derived from the master seed and K) and picks
/// the K with the highest mean coherence, smallest K on ties. A failing K is
/// recorded and skipped. Fits run on up to `threads` threads; results do not
/// depend on the thread count.
inline SweepResult coherence_sweep(const LdaCorpus& corpus, const std::vector<std::size_t>& K_range,
                                   const LdaOptions& base, CoherenceMeasure measure, std::size_t top_n = 10,
                                   std::size_t threads = 1, bool keep_fits = false) {
    if (K_range.empty()) throw UsageError("coherence_sweep: empty K range");
    for (auto K : K_range) {
        if (K < 2) throw UsageError("coherence_sweep: every K must be >= 2");
    }
    SweepResult result;
    result.curve.resize(K_range.size());
    auto run_one = [&](std::size_t i) {
        SweepPoint& pt = result.curve[i];
        pt.K = K_range[i];
        try {
            LdaOptions o = base;
            o.K = pt.K;
            if (!base.alpha) o.alpha.reset();
            o.seed = sweep_seed(base.seed, pt.K);
            auto fit = lda_fit(corpus, o);
            pt.mean_coherence = coherence(fit.model, corpus, measure, top_n).mean;
            pt.ok = true;
            if (keep_fits) pt.fit = std::move(fit);
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    };
    threads = std::max<std::size_t>(1, threads);
    for (std::size_t start = 0; start < K_range.size(); start += threads) {
        std::vector<std::future<void>> jobs;
        for (std::size_t i = start; i < std::min(K_range.size(), start + threads); ++i) {
            if (threads == 1) {
                run_one(i);
            } else {
                jobs.push_back(std::async(std::launch::async, run_one, i));
            }
        }
        for (auto& j : jobs) j.get();
    }
    for (const auto& pt : result.curve) {
        if (!pt.ok) continue;
        if (!result.selected_K) {
            result.selected_K = pt.K;
            continue;
        }
        const auto& best = *std::find_if(result.curve.begin(), result.curve.end(),
                                         [&](const SweepPoint& p) { return p.K == *result.selected_K; });
        if (pt.mean_coherence > best.mean_coherence ||
            (pt.mean_coherence == best.mean_coherence && pt.K < best.K)) {
            result.selected_K = pt.K;
        }
    }
    return result;
}

struct TopicDistribution {
    std::vector<std::size_t> counts;
    std::vector<double> percent;  // exact
    std::vector<double> percent_rounded;  // one decimal
};

inline TopicDistribution topic_distribution(const std::vector<DocTopics>& docs, std::size_t K) {
    TopicDistribution t;
    t.counts.assign(K, 0);
    for (const auto& d : docs) {
        if (d.dominant >= K) throw DataError("topic_distribution: dominant topic out of range");
        ++t.counts[d.dominant];
    }
    const double n = static_cast<double>(docs.size());
    for (std::size_t k = 0; k < K; ++k) {
        const double pct = docs.empty() ? 0.0 : 100.0 * static_cast<double>(t.counts[k]) / n;
        t.percent.push_back(pct);
        t.percent_rounded.push_back(std::round(pct * 10.0) / 10.0);
    }
    return t;
}

inline nlohmann::json to_json(const LdaModel& m) {
    return {{"K", m.K},
            {"alpha", m.alpha},
            {"beta", m.beta},
            {"vocab_fingerprint", m.vocab_fingerprint},
            {"terms", m.terms},
            {"phi", m.phi},
            {"n_wk", m.n_wk},
            {"seed", m.seed},
            {"iterations", m.iterations},
            {"burn_in", m.burn_in},
            {"log_likelihood_trace", m.log_likelihood_trace}};
}

inline LdaModel lda_model_from_json(const nlohmann::json& j) {
    try {
        LdaModel m;
        m.K = j.at("K").get<std::size_t>();
        m.alpha = j.at("alpha").get<double>();
        m.beta = j.at("beta").get<double>();
        m.vocab_fingerprint = j.at("vocab_fingerprint").get<std::string>();
        m.terms = j.at("terms").get<std::vector<std::string>>();
        m.V = m.terms.size();
        m.phi = j.at("phi").get<std::vector<double>>();
        m.n_wk = j.at("n_wk").get<std::vector<std::uint32_t>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.iterations = j.at("iterations").get<int>();
        m.burn_in = j.value("burn_in", 0);
        m.log_likelihood_trace = j.value("log_likelihood_trace", std::vector<double>{});
        if (m.phi.size() != m.K * m.V || m.n_wk.size() != m.K * m.V) throw DataError("LDA model: table sizes");
        m.n_k.assign(m.K, 0);
        for (std::size_t w = 0; w < m.V; ++w) {
            for (std::size_t k = 0; k < m.K; ++k) m.n_k[k] += m.n_wk[w * m.K + k];
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("malformed LDA model file: {}", e.what()));
    }
}

}  // namespace tweetscope
