#pragma once

// Static report artifacts: Jensen-Shannon divergence, classical MDS for the
// intertopic distance map, SVG renderers and the run report directory.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/error.hpp"
#include "tweetscope/hash.hpp"
#include "tweetscope/topics.hpp"
#include "tweetscope/trends.hpp"

namespace tweetscope {

/// JS(p, q) = KL(p || m) / 2 + KL(q || m) / 2 with m = (p + q) / 2, natural log.
inline double js_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty()) throw UsageError("js_divergence: vectors must be nonempty and equal length");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw UsageError("js_divergence: negative or NaN probability");
        sp += p[i];
        sq += q[i];
    }
    if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6) {
        throw UsageError(fmt::format("js_divergence: inputs not normalized (sums {} and {})", sp, sq));
    }
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
    }
    return std::clamp(js, 0.0, std::log(2.0));
}

struct Point2 {
    double x = 0.0, y = 0.0;
};

/// Classical (Torgerson) MDS: double-centre the squared distances, take the
/// top eigenpairs and scale each eigenvector by sqrt(eigenvalue). Negative
/// eigenvalues are clamped to zero. Each axis is oriented so its
/// largest-magnitude coordinate is positive.
inline std::vector<Point2> classical_mds(const std::vector<std::vector<double>>& dist) {
    const std::size_t n = dist.size();
    if (n == 0) return {};
    Eigen::MatrixXd D2(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n) throw UsageError("classical_mds: distance matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(dist[i][j])) throw NumericError("classical_mds: non-finite distance");
            D2(i, j) = dist[i][j] * dist[i][j];
        }
    }
    const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::MatrixXd B = -0.5 * J * D2 * J;
    B = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    if (eig.info() != Eigen::Success) throw NumericError("classical_mds: eigendecomposition failed");
    std::vector<Point2> out(n);
    for (int axis = 0; axis < 2 && axis < static_cast<int>(n); ++axis) {
        const Eigen::Index col = static_cast<Eigen::Index>(n) - 1 - axis;  // ascending order
        const double lambda = std::max(0.0, eig.eigenvalues()(col));
        Eigen::VectorXd v = eig.eigenvectors().col(col);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < v.size(); ++i) {
            if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
        }
        if (v(arg) < 0) v = -v;
        const double s = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i) (axis == 0 ? out[i].x : out[i].y) = v(static_cast<Eigen::Index>(i)) * s;
    }
    return out;
}

struct TopicMap {
    std::vector<Point2> coords;
    std::vector<double> sizes;
    std::vector<std::string> labels;
};

/// Pairwise JS divergences between phi rows embedded by classical MDS;
/// sizes are mean document-topic proportions.
inline TopicMap intertopic_map(const LdaModel& model, const std::vector<DocTopics>& docs,
                               std::vector<std::string> labels = {}) {
    const std::size_t K = model.K;
    if (K < 2) throw UsageError("intertopic_map: need K >= 2");
    if (docs.empty()) throw DataError("intertopic_map: no documents");
    std::vector<std::vector<double>> dist(K, std::vector<double>(K, 0.0));
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = a + 1; b < K; ++b) {
            dist[a][b] = dist[b][a] = js_divergence(model.phi_row(a), model.phi_row(b));
        }
    }
    TopicMap map;
    map.coords = classical_mds(dist);
    map.sizes.assign(K, 0.0);
    for (const auto& d : docs) {
        for (std::size_t k = 0; k < K; ++k) map.sizes[k] += d.theta[k];
    }
    for (auto& s : map.sizes) s /= static_cast<double>(docs.size());
    map.labels = labels.empty() ? default_theme_names(K) : std::move(labels);
    if (map.labels.size() != K) throw UsageError("intertopic_map: label count differs from K");
    return map;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Series {
    std::string name;
    std::vector<std::optional<double>> values;  // nullopt leaves a gap
};

struct ChartLabels {
    std::string title;
    std::string x_axis;
    std::string y_axis;
    std::vector<std::string> x_ticks;  // one per point, optional
};

namespace detail {

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

inline std::string num(double v) { return fmt::format("{:.2f}", v); }

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw UsageError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace detail

/// One polyline per contiguous run of values; isolated points become dots.
inline std::string line_chart_svg(const std::vector<Series>& series, const ChartLabels& labels) {
    if (series.empty()) throw UsageError("render_line_chart: no series");
    std::size_t n = 0;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (const auto& v : s.values) {
            if (!v) continue;
            if (!std::isfinite(*v)) throw NumericError("render_line_chart: non-finite value");
            lo = any ? std::min(lo, *v) : *v;
            hi = any ? std::max(hi, *v) : *v;
            any = true;
        }
    }
    if (n == 0) throw UsageError("render_line_chart: series are empty");
    if (hi == lo) {
        hi += 1.0;
        lo -= 1.0;
    }
    const double W = 720, H = 420, left = 70, right = 200, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto X = [&](std::size_t i) { return left + (n == 1 ? pw / 2 : pw * static_cast<double>(i) / static_cast<double>(n - 1)); };
    auto Y = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

    std::string svg = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        W, H);
    svg += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
                       detail::num(left + pw / 2), xml_escape(labels.title));
    svg += fmt::format("<g stroke=\"black\" stroke-width=\"1\"><line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>"
                       "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\"/></g>\n",
                       detail::num(left), detail::num(top + ph), detail::num(left + pw), detail::num(top));
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                           detail::num(left - 6), detail::num(Y(v) + 4), fmt::format("{:.3g}", v));
    }
    if (!labels.x_ticks.empty()) {
        const std::size_t step = std::max<std::size_t>(1, labels.x_ticks.size() / 10);
        for (std::size_t i = 0; i < labels.x_ticks.size() && i < n; i += step) {
            svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                               detail::num(X(i)), detail::num(top + ph + 16), xml_escape(labels.x_ticks[i]));
        }
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       detail::num(left + pw / 2), detail::num(H - 14), xml_escape(labels.x_axis));
    svg += fmt::format("<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                       detail::num(top + ph / 2), xml_escape(labels.y_axis));

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& vals = series[s].values;
        svg += fmt::format("<g class=\"series\" stroke=\"{}\" fill=\"none\" stroke-width=\"2\">\n", detail::palette(s));
        std::size_t i = 0;
        while (i < vals.size()) {
            if (!vals[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < vals.size() && vals[j]) ++j;
            if (j - i == 1) {
                svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n", detail::num(X(i)),
                                   detail::num(Y(*vals[i])), detail::palette(s));
            } else {
                svg += "<polyline points=\"";
                for (std::size_t p = i; p < j; ++p) {
                    if (p > i) svg += ' ';
                    svg += detail::num(X(p)) + "," + detail::num(Y(*vals[p]));
                }
                svg += "\"/>\n";
            }
            i = j;
        }
        svg += "</g>\n";
    }
    svg += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = top + 10 + 18.0 * static_cast<double>(s);
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>"
                           "<text x=\"{}\" y=\"{}\">{}</text>\n",
                           detail::num(left + pw + 16), detail::num(y - 10), detail::palette(s),
                           detail::num(left + pw + 34), detail::num(y), xml_escape(series[s].name));
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

inline void render_line_chart(const std::vector<Series>& series, const ChartLabels& labels,
                              const std::filesystem::path& path) {
    detail::write_text_file(path, line_chart_svg(series, labels));
}

/// Circle area proportional to topic size; the largest topic gets max_radius.
inline std::string topic_map_svg(const TopicMap& map, double max_radius = 60.0) {
    const std::size_t K = map.coords.size();
    if (K == 0 || map.sizes.size() != K || map.labels.size() != K) throw UsageError("render_topic_map: inconsistent map");
    double smax = 0.0;
    for (double s : map.sizes) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw NumericError("render_topic_map: invalid size");
        smax = std::max(smax, s);
    }
    double xmin = map.coords[0].x, xmax = xmin, ymin = map.coords[0].y, ymax = ymin;
    for (const auto& c : map.coords) {
        if (!std::isfinite(c.x) || !std::isfinite(c.y)) throw NumericError("render_topic_map: non-finite coordinate");
        xmin = std::min(xmin, c.x);
        xmax = std::max(xmax, c.x);
        ymin = std::min(ymin, c.y);
        ymax = std::max(ymax, c.y);
    }
    const double W = 600, H = 600, pad = max_radius + 20;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = (W - 2 * pad) / span;
    const double cx0 = (xmin + xmax) / 2, cy0 = (ymin + ymax) / 2;
    auto X = [&](double x) { return W / 2 + (x - cx0) * scale; };
    auto Y = [&](double y) { return H / 2 - (y - cy0) * scale; };

    std::string svg = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<g stroke=\"#bbbbbb\"><line x1=\"{2}\" y1=\"0\" x2=\"{2}\" y2=\"{1}\"/><line x1=\"0\" y1=\"{3}\" x2=\"{0}\" y2=\"{3}\"/></g>\n"
        "<text x=\"{4}\" y=\"{5}\" font-family=\"sans-serif\" font-size=\"12\">PC1</text>\n"
        "<text x=\"{6}\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\">PC2</text>\n",
        W, H, detail::num(X(0.0)), detail::num(Y(0.0)), W - 30, detail::num(Y(0.0) - 4), detail::num(X(0.0) + 4));
    svg += "<g class=\"topics\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n";
    for (std::size_t k = 0; k < K; ++k) {
        const double r = smax > 0 ? max_radius * std::sqrt(map.sizes[k] / smax) : 0.0;
        svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" fill-opacity=\"0.5\" stroke=\"#333333\"/>"
                           "<text x=\"{}\" y=\"{}\">{}</text>\n",
                           detail::num(X(map.coords[k].x)), detail::num(Y(map.coords[k].y)), fmt::format("{:.4f}", r),
                           detail::palette(k), detail::num(X(map.coords[k].x)), detail::num(Y(map.coords[k].y) + 4),
                           xml_escape(map.labels[k]));
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

inline void render_topic_map(const TopicMap& map, const std::filesystem::path& path) {
    detail::write_text_file(path, topic_map_svg(map));
}

struct CoherencePoint {
    std::size_t K = 0;
    std::optional<double> mean;  // nullopt when the fit failed
};

inline std::string coherence_csv(const std::vector<CoherencePoint>& curve) {
    std::string s = "K,mean_coherence\n";
    for (const auto& p : curve) s += p.mean ? fmt::format("{},{:.6f}\n", p.K, *p.mean) : fmt::format("{},\n", p.K);
    return s;
}

inline std::vector<CoherencePoint> coherence_curve(const SweepResult& sweep) {
    std::vector<CoherencePoint> out;
    for (const auto& p : sweep.curve) out.push_back({p.K, p.ok ? std::optional<double>(p.mean_coherence) : std::nullopt});
    return out;
}

/// Everything a run may have produced. Absent pieces are listed in the
/// manifest as missing stages.
struct RunArtifacts {
    std::optional<std::string> labels_csv;
    std::optional<nlohmann::json> metrics;
    std::optional<nlohmann::json> topics;
    std::optional<std::vector<CoherencePoint>> coherence;
    std::optional<TrendMatrix> trend;
    std::vector<std::string> theme_names;
    std::optional<TopicMap> topic_map;
    std::optional<std::vector<AlignmentRow>> alignment;
    nlohmann::json run_info = nlohmann::json::object();
};

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;
};

/// Writes the report directory and its manifest.json, which lists each file
/// with its SHA-256 and size plus any missing stages. Returns the manifest.
inline nlohmann::json emit_run_report(const RunArtifacts& a, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw UsageError(fmt::format("cannot create report directory '{}': {}", dir.string(), ec.message()));

    std::map<std::string, std::string> files;
    nlohmann::json missing = nlohmann::json::array();
    auto mark_missing = [&](std::string stage, std::vector<std::string> names) {
        missing.push_back({{"stage", std::move(stage)}, {"files", std::move(names)}});
    };

    if (a.labels_csv) files["labels.csv"] = *a.labels_csv;
    else mark_missing("predict", {"labels.csv"});
    if (a.metrics) files["metrics.json"] = a.metrics->dump(2) + "\n";
    else mark_missing("train", {"metrics.json"});
    if (a.topics) files["topics.json"] = a.topics->dump(2) + "\n";
    else mark_missing("topics", {"topics.json"});
    if (a.coherence) {
        files["coherence.csv"] = coherence_csv(*a.coherence);
        Series s{"mean coherence", {}};
        ChartLabels l{"Topic coherence by number of topics", "number of topics (K)", "mean coherence", {}};
        for (const auto& p : *a.coherence) {
            s.values.push_back(p.mean);
            l.x_ticks.push_back(std::to_string(p.K));
        }
        files["coherence.svg"] = line_chart_svg({s}, l);
    } else {
        mark_missing("sweep", {"coherence.csv", "coherence.svg"});
    }
    if (a.trend && a.trend->weeks() > 0) {
        const auto& t = *a.trend;
        const auto names = a.theme_names.size() == t.K ? a.theme_names : default_theme_names(t.K);
        files["trend.csv"] = trend_csv(t);
        files["trend_counts.csv"] = trend_counts_csv(t);
        std::vector<Series> series;
        for (std::size_t k = 0; k < t.K; ++k) {
            Series s{names[k], {}};
            for (std::size_t w = 0; w < t.weeks(); ++w) {
                s.values.push_back(t.empty[w] ? std::nullopt : std::optional<double>(t.values[w][k]));
            }
            series.push_back(std::move(s));
        }
        ChartLabels l{"Topic trend by week", "week starting", "share of documents (%)", {}};
        for (const auto& d : t.week_starts) l.x_ticks.push_back(format_date(d).substr(5));
        files["trend.svg"] = line_chart_svg(series, l);
    } else {
        mark_missing("trends", {"trend.csv", "trend_counts.csv", "trend.svg"});
    }
    if (a.topic_map) files["topic_map.svg"] = topic_map_svg(*a.topic_map);
    else mark_missing("topics", {"topic_map.svg"});
    if (a.alignment) files["alignment.md"] = alignment_markdown(*a.alignment);
    else mark_missing("trends", {"alignment.md"});

    nlohmann::json listed = nlohmann::json::array();
    for (const auto& [name, content] : files) {
        detail::write_text_file(dir / name, content);
        listed.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    nlohmann::json manifest = {{"files", listed}, {"missing", missing}, {"run", a.run_info}};
    detail::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

}  // namespace tweetscope
