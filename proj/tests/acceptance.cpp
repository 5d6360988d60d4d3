// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>
#include <thread>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "oracles.hpp"
#include "tweetscope/balance.hpp"
#include "tweetscope/classify.hpp"
#include "tweetscope/corpus.hpp"
#include "tweetscope/features.hpp"
#include "tweetscope/report.hpp"
#include "tweetscope/topics.hpp"
#include "tweetscope/trends.hpp"

using namespace tweetscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Records the first failure; later checks still run so the detail is useful.
struct Check {
    Outcome o;
    void operator()(bool cond, const std::string& what) {
        if (!cond && o.ok) {
            o.ok = false;
            o.detail = what;
        }
    }
};

std::vector<Label> to_labels(const std::vector<int>& y) {
    std::vector<Label> out;
    for (int v : y) out.push_back(v ? Label::Relevant : Label::Irrelevant);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome porter() {
    std::ifstream voc(fs::path(TS_TEST_DATA_DIR) / "porter_voc.txt");
    std::ifstream out(fs::path(TS_TEST_DATA_DIR) / "porter_output.txt");
    std::string w, s;
    std::size_t n = 0, bad = 0;
    while (std::getline(voc, w) && std::getline(out, s)) {
        ++n;
        bad += porter_stem(w) != s;
    }
    Check c;
    c(n > 23000, fmt::format("only {} reference words read", n));
    c(bad == 0, fmt::format("{} of {} words differ", bad, n));
    if (c.o.ok) c.o.detail = fmt::format("{} words, 0 mismatches", n);
    return c.o;
}

Outcome split_arithmetic() {
    std::vector<Label> y(1500, Label::Irrelevant);
    std::mt19937_64 eng(1);
    std::vector<std::size_t> idx(1500);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), eng);
    for (std::size_t i = 0; i < 1154; ++i) y[idx[i]] = Label::Relevant;
    Check c;
    for (std::uint64_t seed : {0u, 1u, 2020u}) {
        SplitSpec spec;
        spec.seed = seed;
        const auto s = split(y, spec);
        c(s.train.size() == 1125 && s.test.size() == 225 && s.validation.size() == 150,
          fmt::format("sizes {}/{}/{}", s.train.size(), s.test.size(), s.validation.size()));
        for (const auto* part : {&s.train, &s.test, &s.validation}) {
            std::size_t rel = 0;
            for (auto i : *part) rel += y[i] == Label::Relevant;
            const double expect = static_cast<double>(part->size()) * 1154.0 / 1500.0;
            c(std::abs(static_cast<double>(rel) - expect) <= 1.0,
              fmt::format("split of {} has {} relevant, expected {:.2f}", part->size(), rel, expect));
        }
    }
    if (c.o.ok) c.o.detail = "1125/225/150, class counts within 1";
    return c.o;
}

Outcome gradient_check() {
    std::mt19937_64 eng(3);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int ds = 0; ds < 10; ++ds) {
        const std::size_t n = 30 + eng() % 70, d = 2 + eng() % 8;
        oracle::Matrix X(n, std::vector<double>(d));
        std::vector<int> yi(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : X[i]) v = g(eng);
            yi[i] = static_cast<int>(eng() % 2);
        }
        const auto y = to_labels(yi);
        for (int pt = 0; pt < 10; ++pt) {
            std::vector<double> w(d);
            for (auto& v : w) v = g(eng);
            const double b = g(eng);
            const auto an = logreg_loss_grad(w, b, X, y, 1e-4);
            const auto fd = oracle::fd_gradient(w, b, X, yi, 1e-4);
            for (std::size_t j = 0; j <= d; ++j) {
                const double a = j < d ? an.grad_w[j] : an.grad_b;
                worst = std::max(worst, std::abs(a - fd[j]) / std::max({std::abs(a), std::abs(fd[j]), 1e-8}));
            }
        }
    }
    return {worst < 1e-4, fmt::format("max relative error {:.2e}", worst)};
}

Outcome classifier_sanity() {
    Check c;
    std::string detail;
    for (bool imbalanced : {false, true}) {
        const auto [X, yi] = imbalanced ? oracle::blobs(230, 770, 4.0, 11) : oracle::blobs(500, 500, 4.0, 10);
        const auto y = to_labels(yi);
        for (auto kind : {ModelKind::LogisticRegression, ModelKind::LinearSvm}) {
            CvOptions opt;
            opt.folds = 5;
            opt.seed = 5;
            opt.classifier.kind = kind;
            opt.smote.enabled = imbalanced;
            const auto r = cross_validate(X, y, opt);
            const auto name = fmt::format("{}{}", to_string(kind), imbalanced ? "+smote(77/23)" : "");
            c(r.accuracy.mean >= 0.95, fmt::format("{} accuracy {:.4f}", name, r.accuracy.mean));
            detail += fmt::format("{}={:.3f} ", name, r.accuracy.mean);
        }
    }
    if (c.o.ok) c.o.detail = detail;
    return c.o;
}

Outcome smote_properties() {
    std::mt19937_64 eng(4);
    std::normal_distribution<double> g;
    std::vector<DenseVector> pts(60, DenseVector(5));
    for (auto& p : pts)
        for (auto& v : p) v = g(eng);
    Check c;
    const auto a = smote(pts, 200, 5, 99), b = smote(pts, 200, 5, 99);
    c(a.synthetic.size() == 140, fmt::format("{} synthetic points, expected 140", a.synthetic.size()));
    for (std::size_t s = 0; s < a.synthetic.size(); ++s) {
        const auto [i, j] = a.parents[s];
        for (std::size_t d = 0; d < 5; ++d) {
            const double v = a.synthetic[s][d];
            c(v >= std::min(pts[i][d], pts[j][d]) && v <= std::max(pts[i][d], pts[j][d]),
              fmt::format("synthetic {} leaves its parents' box in dim {}", s, d));
        }
    }
    bool same = a.synthetic.size() == b.synthetic.size();
    for (std::size_t s = 0; same && s < a.synthetic.size(); ++s)
        same = std::memcmp(a.synthetic[s].data(), b.synthetic[s].data(), 5 * sizeof(double)) == 0;
    c(same, "two runs with one seed differ");
    if (c.o.ok) c.o.detail = "140 points in bounds, byte-identical rerun";
    return c.o;
}

Outcome tfidf_oracle() {
    std::mt19937_64 eng(6);
    double worst = 0.0;
    std::size_t corpora = 0;
    Check c;
    while (corpora < 100) {
        std::vector<std::vector<std::string>> docs(3 + eng() % 10);
        const std::size_t alpha = 3 + eng() % 12;
        for (auto& d : docs)
            for (std::size_t i = 0, n = 1 + eng() % 12; i < n; ++i) d.push_back(fmt::format("t{}", eng() % alpha));
        const std::size_t min_df = 1 + eng() % 2;
        const double max_df = (eng() % 2) ? 1.0 : 0.75;
        Vocabulary v;
        try {
            v = build_vocabulary(docs, min_df, max_df);
        } catch (const DataError&) {
            continue;
        }
        ++corpora;
        const auto ref = oracle::tfidf(docs, min_df, max_df);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            const auto x = tfidf_vectorize(docs[d], v);
            c(x.entries.size() == ref[d].size(), "nonzero pattern differs");
            for (const auto& e : x.entries) {
                auto it = ref[d].find(v.terms()[e.index]);
                if (it == ref[d].end()) {
                    c(false, "unexpected term");
                    continue;
                }
                worst = std::max(worst, std::abs(e.weight - it->second));
            }
        }
    }
    c(worst <= 1e-12, fmt::format("max deviation {:.2e}", worst));
    if (c.o.ok) c.o.detail = fmt::format("100 corpora, max deviation {:.1e}", worst);
    return c.o;
}

LdaCorpus planted_corpus(const oracle::Planted& p) {
    LdaCorpus c;
    c.terms = p.terms;
    c.docs = p.docs;
    return c;
}

const oracle::Planted& planted() {
    static const auto p = oracle::planted(4, 10, 2000, 20, 0.1, 0.95, 7);
    return p;
}

Outcome lda_recovery() {
    const auto corpus = planted_corpus(planted());
    LdaOptions opt;
    opt.K = 4;
    opt.seed = 2020;
    bool conserved = true;
    int sweeps = 0;
    const auto fit = lda_fit(corpus, opt, [&](const GibbsState& s, int) {
        ++sweeps;
        std::uint64_t total = 0;
        for (std::size_t k = 0; k < s.K; ++k) {
            std::uint64_t col = 0;
            for (std::size_t w = 0; w < s.V; ++w) col += s.word_topic(w, k);
            conserved &= col == s.n_k[k];
            total += col;
        }
        for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
            std::uint64_t len = 0;
            for (std::size_t k = 0; k < s.K; ++k) len += s.doc_topic(d, k);
            conserved &= len == corpus.docs[d].size();
        }
        conserved &= total == corpus.total_tokens();
    });
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < 4; ++k) rows.emplace_back(fit.model.phi_row(k).begin(), fit.model.phi_row(k).end());
    const double cos = oracle::best_match_cosine(planted().phi, rows);
    Check c;
    c(cos >= 0.9, fmt::format("best-match cosine {:.4f}", cos));
    c(conserved, "count conservation violated");
    c(sweeps == opt.iterations, fmt::format("observer saw {} sweeps", sweeps));
    if (c.o.ok) c.o.detail = fmt::format("cosine {:.4f}, counts conserved over {} sweeps", cos, sweeps);
    return c.o;
}

Outcome coherence_sweep_check() {
    const auto corpus = planted_corpus(planted());
    LdaOptions base;
    base.seed = 2020;
    const std::vector<std::size_t> Ks = {2, 3, 4, 5, 6, 7, 8};
    const auto r = coherence_sweep(corpus, Ks, base, CoherenceMeasure::UMass, 10, std::thread::hardware_concurrency());
    const auto csv = coherence_csv(coherence_curve(r));
    const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    Check c;
    c(r.selected_K && *r.selected_K >= 3 && *r.selected_K <= 5,
      fmt::format("selected K = {}", r.selected_K ? std::to_string(*r.selected_K) : "none"));
    c(lines == Ks.size() + 1, fmt::format("CSV has {} lines", lines));
    std::string curve;
    for (const auto& p : r.curve) curve += fmt::format(" {}:{:.1f}", p.K, p.mean_coherence);
    c.o.detail = c.o.ok ? fmt::format("selected K={};{}", *r.selected_K, curve) : c.o.detail + ";" + curve;
    return c.o;
}

Outcome trend_oracle() {
    std::mt19937_64 eng(9);
    const std::size_t K = 8;
    std::vector<CleanDocument> docs;
    std::vector<std::size_t> topics;
    const auto origin = kDefaultWeekOrigin;
    for (int i = 0; i < 5000; ++i) {
        CleanDocument d;
        d.id = fmt::format("d{}", i);
        int day = static_cast<int>(eng() % 126);
        if (day / 7 == 6) day += 7;  // leave week 6 empty
        d.timestamp = std::chrono::sys_days(origin + std::chrono::days{day}) + std::chrono::seconds(eng() % 86400);
        docs.push_back(std::move(d));
        topics.push_back(eng() % K);
    }
    const auto weeks = assign_weeks(docs, origin);
    std::vector<int> hand_weeks;
    for (const auto& d : docs) hand_weeks.push_back(static_cast<int>((date_of(d.timestamp) - origin).count() / 7));
    const auto t = topic_trend(topics, weeks, K, origin);
    const auto ref = oracle::tally(topics, hand_weeks, K);
    Check c;
    c(weeks == hand_weeks, "week assignment differs from direct computation");
    std::size_t nonempty = 0;
    for (std::size_t w = 0; w < t.weeks(); ++w) {
        auto it = ref.find(t.first_week + static_cast<int>(w));
        if (it == ref.end()) {
            c(t.empty[w], fmt::format("week {} should be empty", w));
            continue;
        }
        ++nonempty;
        std::size_t total = 0;
        for (auto n : it->second) total += n;
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            c(t.values[w][k] == 100.0 * static_cast<double>(it->second[k]) / static_cast<double>(total),
              fmt::format("week {} topic {} percentage differs", w, k));
            sum += t.values[w][k];
        }
        c(std::abs(sum - 100.0) <= 1e-6, fmt::format("week {} sums to {}", w, sum));
    }
    c(nonempty + 1 == t.weeks(), "expected exactly one empty week");
    if (c.o.ok) c.o.detail = fmt::format("{} weeks ({} nonempty) match the tally", t.weeks(), nonempty);
    return c.o;
}

Outcome js_mds() {
    std::mt19937_64 eng(12);
    std::exponential_distribution<double> ex(1.0);
    double worst_sym = 0.0, lo = 1.0, hi = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + eng() % 30;
        std::vector<double> p(n), q(n);
        double sp = 0, sq = 0;
        for (std::size_t j = 0; j < n; ++j) {
            p[j] = (eng() % 4 == 0) ? 0.0 : ex(eng);
            q[j] = (eng() % 4 == 0) ? 0.0 : ex(eng);
            sp += p[j];
            sq += q[j];
        }
        if (sp == 0) p[0] = sp = 1;
        if (sq == 0) q[n - 1] = sq = 1;
        for (auto& v : p) v /= sp;
        for (auto& v : q) v /= sq;
        const double a = js_divergence(p, q), b = js_divergence(q, p);
        worst_sym = std::max(worst_sym, std::abs(a - b));
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    const auto x = classical_mds({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    double worst_tri = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j)
            worst_tri = std::max(worst_tri, std::abs(std::hypot(x[i].x - x[j].x, x[i].y - x[j].y) - 1.0));
        worst_tri = std::max(worst_tri, std::abs(std::hypot(x[i].x, x[i].y) - 1.0 / std::sqrt(3.0)));
    }
    Check c;
    c(worst_sym <= 1e-12, fmt::format("asymmetry {:.2e}", worst_sym));
    c(lo >= -1e-12 && hi <= std::log(2.0) + 1e-12, fmt::format("range [{}, {}]", lo, hi));
    c(worst_tri <= 1e-6, fmt::format("triangle error {:.2e}", worst_tri));
    if (c.o.ok) c.o.detail = fmt::format("asymmetry {:.1e}, JS in [{:.3f}, {:.3f}], triangle error {:.1e}", worst_sym, lo, hi, worst_tri);
    return c.o;
}

Outcome pipeline_determinism() {
    const auto cfg = fs::path(TS_SOURCE_DIR) / "data" / "sample" / "sample.ini";
    const auto base = fs::temp_directory_path() / "tweetscope_acceptance";
    fs::remove_all(base);
    std::vector<std::string> manifests;
    std::string times;
    Check c;
    for (int run = 0; run < 2; ++run) {
        const auto out = base / fmt::format("run{}", run);
        const auto cmd = fmt::format("\"{}\" pipeline --config \"{}\" --out \"{}\" > \"{}\" 2>&1", TS_CLI_PATH,
                                     cfg.string(), out.string(), (base.string() + fmt::format("_log{}.txt", run)));
        const auto t0 = std::chrono::steady_clock::now();
        const int status = std::system(cmd.c_str());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        times += fmt::format(" run{}={:.1f}s", run + 1, secs);
        c(WIFEXITED(status) && WEXITSTATUS(status) == 0, fmt::format("pipeline run {} failed", run + 1));
        c(secs < 180.0, fmt::format("pipeline run {} took {:.1f}s", run + 1, secs));
        manifests.push_back(slurp(out / "report" / "manifest.json"));
    }
    c(!manifests[0].empty() && manifests[0] == manifests[1], "manifests differ");
    if (c.o.ok) c.o.detail = "manifests byte-identical;" + times;
    else c.o.detail += ";" + times;
    return c.o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0 = no time limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "Porter stemmer reference vocabulary", 5, porter},
        {2, "stratified split arithmetic", 0, split_arithmetic},
        {3, "logistic-regression gradient check", 10, gradient_check},
        {4, "classifier sanity on Gaussian blobs", 30, classifier_sanity},
        {5, "SMOTE properties", 0, smote_properties},
        {6, "TF-IDF oracle", 0, tfidf_oracle},
        {7, "LDA planted-topic recovery", 60, lda_recovery},
        {8, "coherence sweep on planted corpus", 300, coherence_sweep_check},
        {9, "weekly trend oracle", 0, trend_oracle},
        {10, "JS divergence and MDS", 0, js_mds},
        {11, "end-to-end pipeline determinism", 360, pipeline_determinism},
    };
    int failures = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cr.limit_s > 0 && secs >= cr.limit_s) {
            o.ok = false;
            o.detail += fmt::format(" (time limit {:.0f}s exceeded)", cr.limit_s);
        }
        failures += !o.ok;
        std::cout << fmt::format("[{}] criterion {:>2}: {} ({:.2f}s) {}", o.ok ? "PASS" : "FAIL", cr.id, cr.name, secs,
                                 o.detail)
                  << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failures, criteria.size()) << std::endl;
    return failures ? 1 : 0;
}
