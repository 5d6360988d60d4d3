#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <filesystem>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tweetscope/report.hpp"

using namespace tweetscope;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::vector<double> random_simplex(std::mt19937_64& eng, std::size_t n, bool sparse) {
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) {
        v = (sparse && eng() % 3 == 0) ? 0.0 : ex(eng);
        s += v;
    }
    if (s == 0.0) {
        p[0] = 1.0;
        return p;
    }
    for (auto& v : p) v /= s;
    return p;
}

pt::ptree parse_xml(const std::string& s) {
    std::istringstream in(s);
    pt::ptree tree;
    pt::read_xml(in, tree);
    return tree;
}

std::vector<double> circle_radii(const std::string& svg) {
    std::vector<double> r;
    const std::regex re("<circle [^>]*r=\"([0-9.]+)\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        r.push_back(std::stod((*it)[1]));
    return r;
}

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST(Js, SymmetryBoundsAndOracle) {
    std::mt19937_64 eng(10);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + eng() % 20;
        const auto p = random_simplex(eng, n, i % 2), q = random_simplex(eng, n, i % 3 == 0);
        const double a = js_divergence(p, q), b = js_divergence(q, p);
        EXPECT_NEAR(a, b, 1e-12);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, std::log(2.0) + 1e-12);
        EXPECT_NEAR(a, oracle::js(p, q), 1e-12);
    }
}

TEST(Js, Extremes) {
    const std::vector<double> p = {0.2, 0.3, 0.5};
    EXPECT_EQ(js_divergence(p, p), 0.0);
    EXPECT_NEAR(js_divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1}), std::log(2.0), 1e-15);
    EXPECT_THROW(js_divergence(p, std::vector<double>{0.5, 0.6, 0.0}), UsageError);
    EXPECT_THROW(js_divergence(p, std::vector<double>{0.5, 0.5}), UsageError);
}

TEST(Mds, EquilateralTriangle) {
    const std::vector<std::vector<double>> d = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    const auto x = classical_mds(d);
    ASSERT_EQ(x.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) EXPECT_NEAR(dist(x[i], x[j]), 1.0, 1e-6);
        EXPECT_NEAR(std::hypot(x[i].x, x[i].y), 1.0 / std::sqrt(3.0), 1e-6);
    }
    EXPECT_NEAR(x[0].x + x[1].x + x[2].x, 0.0, 1e-9);
    EXPECT_NEAR(x[0].y + x[1].y + x[2].y, 0.0, 1e-9);
}

TEST(Mds, PlanarPointsRecoveredExactly) {
    const std::vector<Point2> pts = {{0, 0}, {3, 0}, {0, 4}, {1, 1}, {-2, 5}};
    std::vector<std::vector<double>> d(5, std::vector<double>(5));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) d[i][j] = dist(pts[i], pts[j]);
    const auto x = classical_mds(d);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(dist(x[i], x[j]), d[i][j], 1e-9);
}

TEST(Mds, GramMatchesJacobiRankTwo) {
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 4 + eng() % 5;
        std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(eng);
        // B = -1/2 J D^2 J, built by hand.
        std::vector<double> row(n, 0.0), col(n, 0.0);
        double all = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                row[i] += d[i][j] * d[i][j] / static_cast<double>(n);
                col[j] += d[i][j] * d[i][j] / static_cast<double>(n);
                all += d[i][j] * d[i][j] / static_cast<double>(n * n);
            }
        oracle::Matrix B(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) B[i][j] = -0.5 * (d[i][j] * d[i][j] - row[i] - col[j] + all);
        const auto e = oracle::jacobi(B);
        const auto x = classical_mds(d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double g = 0.0;
                for (std::size_t a = 0; a < 2; ++a) g += std::max(0.0, e.values[a]) * e.vecs[i][a] * e.vecs[j][a];
                EXPECT_NEAR(x[i].x * x[j].x + x[i].y * x[j].y, g, 1e-9);
            }
    }
}

TEST(Mds, Errors) {
    EXPECT_TRUE(classical_mds({}).empty());
    EXPECT_THROW(classical_mds({{0, 1}, {1}}), UsageError);
}

TEST(TopicMap, SizesFromThetaAndRadii) {
    LdaModel m;
    m.K = 3;
    m.V = 3;
    m.terms = {"a", "b", "c"};
    m.phi = {0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8};
    std::vector<DocTopics> docs(2);
    docs[0].theta = {0.6, 0.3, 0.1};
    docs[1].theta = {0.6, 0.1, 0.3};
    const auto map = intertopic_map(m, docs);
    EXPECT_NEAR(map.sizes[0], 0.6, 1e-15);
    EXPECT_NEAR(map.sizes[1], 0.2, 1e-15);
    EXPECT_EQ(map.labels[2], "Topic 3");
    const double side = js_divergence(m.phi_row(0), m.phi_row(1));
    EXPECT_NEAR(dist(map.coords[0], map.coords[1]), side, 1e-9);

    TopicMap t{{{0, 0}, {1, 0}, {0, 1}}, {1.0, 4.0, 0.0}, {"x", "y", "<z>"}};
    const auto svg = topic_map_svg(t, 60.0);
    EXPECT_NO_THROW(parse_xml(svg));
    const auto r = circle_radii(svg);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[1], 60.0, 1e-4);
    EXPECT_NEAR(r[0], 30.0, 1e-4);
    EXPECT_EQ(r[2], 0.0);
    EXPECT_NE(svg.find("&lt;z&gt;"), std::string::npos);
}

TEST(LineChart, GapsDotsLegendAndWellFormed) {
    Series a{"A & B", {1.0, 2.0, std::nullopt, 4.0, std::nullopt, 6.0, 7.0}};
    Series b{"flat", {3.0, 3.0, 3.0}};
    const auto svg = line_chart_svg({a, b}, {"t<itle>", "x", "y", {"w0", "w1"}});
    EXPECT_NO_THROW(parse_xml(svg));
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) ++polylines, ++pos;
    EXPECT_EQ(polylines, 3u);
    EXPECT_EQ(circle_radii(svg).size(), 1u);
    EXPECT_NE(svg.find("A &amp; B"), std::string::npos);
    EXPECT_NE(svg.find("class=\"legend\""), std::string::npos);
    EXPECT_EQ(svg, line_chart_svg({a, b}, {"t<itle>", "x", "y", {"w0", "w1"}}));
    EXPECT_THROW(line_chart_svg({}, {}), UsageError);
    EXPECT_THROW(line_chart_svg({Series{"n", {std::nan("")}}}, {}), NumericError);
}

TEST(Coherence, CsvRows) {
    EXPECT_EQ(coherence_csv({{2, -1.5}, {3, std::nullopt}}), "K,mean_coherence\n2,-1.500000\n3,\n");
}

TEST(Manifest, MissingStagesAndHashes) {
    const auto dir = fs::temp_directory_path() / "tweetscope_report_test";
    fs::remove_all(dir);
    RunArtifacts a;
    a.labels_csv = "id,label,score,probability\n1,relevant,0.5,0.62\n";
    a.coherence = std::vector<CoherencePoint>{{2, -3.0}, {3, -2.0}};
    a.run_info = {{"seed", 1}};
    const auto m = emit_run_report(a, dir);
    std::vector<std::string> paths;
    for (const auto& f : m["files"]) {
        paths.push_back(f["path"].get<std::string>());
        EXPECT_EQ(fs::file_size(dir / f["path"].get<std::string>()), f["bytes"].get<std::size_t>());
    }
    EXPECT_EQ(paths, (std::vector<std::string>{"coherence.csv", "coherence.svg", "labels.csv"}));
    EXPECT_EQ(m["files"][2]["sha256"], sha256_hex(*a.labels_csv));
    std::set<std::string> stages;
    for (const auto& s : m["missing"]) stages.insert(s["stage"].get<std::string>());
    EXPECT_EQ(stages, (std::set<std::string>{"train", "topics", "trends"}));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_EQ(emit_run_report(a, dir), m);
}
