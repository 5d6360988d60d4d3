#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tweetscope/trends.hpp"

using namespace tweetscope;
namespace fs = std::filesystem;

namespace {

using Topics = std::vector<std::size_t>;
using Weeks = std::vector<int>;

CleanDocument doc_at(std::string id, std::string ts) {
    CleanDocument d;
    d.id = std::move(id);
    d.tokens = {"x"};
    d.timestamp = parse_rfc3339(ts);
    return d;
}

TrendMatrix single_week(std::vector<std::size_t> counts) {
    std::vector<std::size_t> topics;
    for (std::size_t k = 0; k < counts.size(); ++k) topics.insert(topics.end(), counts[k], k);
    return topic_trend(topics, std::vector<int>(topics.size(), 0), counts.size());
}

}  // namespace

TEST(Weeks, Examples) {
    const std::vector<CleanDocument> docs = {doc_at("a", "2020-01-01T00:00:00Z"), doc_at("b", "2020-01-07T23:59:59Z"),
                                             doc_at("c", "2020-01-08T00:00:00Z")};
    EXPECT_EQ(assign_weeks(docs), (std::vector<int>{0, 0, 1}));
    try {
        assign_weeks({doc_at("early", "2019-12-31T12:00:00Z")});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("early"), std::string::npos);
    }
    EXPECT_EQ(format_date(week_start(2, kDefaultWeekOrigin)), "2020-01-15");
}

TEST(Trend, Examples) {
    const auto t = topic_trend(Topics{0, 0, 1, 1}, Weeks{0, 0, 0, 0}, 2);
    EXPECT_EQ(t.values[0], (std::vector<double>{50.0, 50.0}));
    const auto one = topic_trend(Topics{2}, Weeks{3}, 3);
    EXPECT_EQ(one.values[0], (std::vector<double>{0.0, 0.0, 100.0}));
    EXPECT_EQ(one.first_week, 3);
    EXPECT_THROW(topic_trend(Topics{3}, Weeks{0}, 3), DataError);
}

TEST(Trend, MatchesTallyWithGaps) {
    std::mt19937_64 eng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t K = 2 + eng() % 7;
        std::vector<std::size_t> topic;
        std::vector<int> week;
        for (int i = 0; i < 1000; ++i) {
            topic.push_back(eng() % K);
            int w = static_cast<int>(eng() % 6);
            if (w == 3) w = 5;  // week 3 stays empty
            week.push_back(w);
        }
        const auto t = topic_trend(topic, week, K);
        const auto ref = oracle::tally(topic, week, K);
        ASSERT_EQ(t.weeks(), 6u);
        for (std::size_t w = 0; w < t.weeks(); ++w) {
            auto it = ref.find(static_cast<int>(w));
            if (it == ref.end()) {
                EXPECT_TRUE(t.empty[w]);
                continue;
            }
            EXPECT_FALSE(t.empty[w]);
            std::size_t total = 0;
            for (auto c : it->second) total += c;
            double row = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                EXPECT_EQ(t.counts[w][k], it->second[k]);
                EXPECT_EQ(t.values[w][k], 100.0 * static_cast<double>(it->second[k]) / static_cast<double>(total));
                row += t.values[w][k];
            }
            EXPECT_NEAR(row, 100.0, 1e-6);
        }
    }
}

TEST(DominantPerWeek, Examples) {
    EXPECT_EQ(dominant_per_week(single_week({1, 5, 4}), 2)[0], (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(dominant_per_week(single_week({5, 5}), 1)[0], (std::vector<std::size_t>{0}));
    EXPECT_EQ(dominant_per_week(single_week({1, 5, 4}), 9)[0], (std::vector<std::size_t>{1, 2, 0}));
    const auto gap = topic_trend(Topics{0, 1}, Weeks{0, 2}, 2);
    EXPECT_TRUE(dominant_per_week(gap)[1].empty());
    EXPECT_THROW(dominant_per_week(TrendMatrix{}), UsageError);
}

TEST(Align, SingleWeekAndSummedWeeks) {
    const auto names = default_theme_names(3);
    const auto t1 = single_week({1, 5, 4});
    const EventTimeline one = {{parse_date("2020-01-01"), parse_date("2020-01-07"), "first"}};
    const auto r1 = align_events(t1, one, names);
    EXPECT_EQ(r1[0].topics, (std::vector<std::size_t>{1, 2, 0}));
    EXPECT_EQ(r1[0].themes, (std::vector<std::string>{"Topic 2", "Topic 3", "Topic 1"}));

    std::mt19937_64 eng(5);
    std::vector<std::size_t> topic;
    std::vector<int> week;
    for (int i = 0; i < 400; ++i) {
        topic.push_back(eng() % 3);
        week.push_back(static_cast<int>(eng() % 4));
    }
    const auto t = topic_trend(topic, week, 3);
    const EventTimeline two = {{parse_date("2020-01-10"), parse_date("2020-01-20"), "weeks 1-2"},
                               {parse_date("2020-06-01"), parse_date("2020-06-30"), "later"}};
    const auto rows = align_events(t, two, names, 3);
    std::vector<std::size_t> hand(3, 0);
    for (std::size_t i = 0; i < topic.size(); ++i)
        if (week[i] == 1 || week[i] == 2) hand[topic[i]]++;
    EXPECT_EQ(rows[0].counts, hand);
    for (std::size_t i = 1; i < 3; ++i) EXPECT_GE(hand[rows[0].topics[i - 1]], hand[rows[0].topics[i]]);
    EXPECT_TRUE(rows[1].out_of_range);
    EXPECT_TRUE(rows[1].topics.empty());
    EXPECT_THROW(align_events(t, two, {"a"}), UsageError);
}

TEST(Timeline, LoadSortAndValidate) {
    const auto dir = fs::temp_directory_path() / "tweetscope_trends_test";
    fs::create_directories(dir);
    std::ofstream(dir / "t.json") << R"([{"start":"2020-02-01","end":"2020-02-03","description":"b"},
                                         {"start":"2020-01-01","end":"2020-01-03","description":"a"}])";
    const auto t = load_timeline(dir / "t.json");
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].description, "a");
    std::ofstream(dir / "bad.json") << R"([{"start":"2020-02-05","end":"2020-02-03","description":"b"}])";
    EXPECT_THROW(load_timeline(dir / "bad.json"), DataError);
    EXPECT_THROW(load_timeline(dir / "missing.json"), UsageError);
}

TEST(Output, CsvAndMarkdown) {
    const auto t = topic_trend(Topics{0, 1, 1, 0}, Weeks{0, 0, 0, 2}, 2);
    EXPECT_EQ(trend_csv(t),
              "week_start,topic_0,topic_1\n"
              "2020-01-01,33.3,66.7\n"
              "2020-01-08,,\n"
              "2020-01-15,100.0,0.0\n");
    EXPECT_EQ(trend_counts_csv(t),
              "week_start,topic_0,topic_1,total\n"
              "2020-01-01,1,2,3\n"
              "2020-01-08,0,0,0\n"
              "2020-01-15,1,0,1\n");
    AlignmentRow r{parse_date("2020-01-01"), parse_date("2020-01-11"), "a | b", {1}, {"Travel"}, {0, 3}, false};
    EXPECT_EQ(alignment_markdown({r}),
              "| Period | Prominent event | Trending topics |\n|---|---|---|\n"
              "| 2020-01-01 to 2020-01-11 | a \\| b | Travel |\n");
}
