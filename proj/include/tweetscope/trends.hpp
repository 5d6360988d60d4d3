#pragma once

// Weekly binning of documents, per-week topic percentages, and alignment of
// the resulting trends with a dated event timeline.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/corpus.hpp"
#include "tweetscope/dates.hpp"
#include "tweetscope/error.hpp"
#include "tweetscope/topics.hpp"

namespace tweetscope {

inline const Date kDefaultWeekOrigin = parse_date("2020-01-01");

inline int week_of(Date day, Date origin) {
    const auto days = (day - origin).count();
    return static_cast<int>(days >= 0 ? days / 7 : -((-days + 6) / 7));
}

inline Date week_start(int week, Date origin) { return origin + std::chrono::days{7 * week}; }

/// week_index = floor((date - origin) / 7 days).
inline std::vector<int> assign_weeks(const std::vector<CleanDocument>& docs, Date origin = kDefaultWeekOrigin) {
    std::vector<int> weeks;
    weeks.reserve(docs.size());
    for (const auto& d : docs) {
        const Date day = date_of(d.timestamp);
        if (day < origin) {
            throw DataError(fmt::format("document '{}' dated {} precedes the week origin {}", d.id, format_date(day),
                                        format_date(origin)));
        }
        weeks.push_back(week_of(day, origin));
    }
    return weeks;
}

inline void assign_weeks_in_place(std::vector<CleanDocument>& docs, Date origin = kDefaultWeekOrigin) {
    const auto weeks = assign_weeks(docs, origin);
    for (std::size_t i = 0; i < docs.size(); ++i) docs[i].week_index = weeks[i];
}

/// Rows cover every week from the first to the last occupied one; weeks
/// with no documents are kept (so plots show gaps) but flagged empty.
struct TrendMatrix {
    Date origin = kDefaultWeekOrigin;
    int first_week = 0;
    std::size_t K = 0;
    std::vector<Date> week_starts;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::size_t>> counts;
    std::vector<bool> empty;

    std::size_t weeks() const { return week_starts.size(); }
    std::size_t row_total(std::size_t w) const {
        return std::accumulate(counts[w].begin(), counts[w].end(), std::size_t{0});
    }
};

inline TrendMatrix topic_trend(const std::vector<std::size_t>& dominant, const std::vector<int>& week_indices,
                               std::size_t K, Date origin = kDefaultWeekOrigin) {
    if (dominant.size() != week_indices.size()) throw UsageError("topic_trend: topic and week lists differ in length");
    TrendMatrix t;
    t.origin = origin;
    t.K = K;
    if (dominant.empty()) return t;
    const auto [lo, hi] = std::minmax_element(week_indices.begin(), week_indices.end());
    t.first_week = *lo;
    const std::size_t W = static_cast<std::size_t>(*hi - *lo + 1);
    t.counts.assign(W, std::vector<std::size_t>(K, 0));
    for (std::size_t i = 0; i < dominant.size(); ++i) {
        if (dominant[i] >= K) throw DataError(fmt::format("topic_trend: topic {} out of range (K={})", dominant[i], K));
        ++t.counts[static_cast<std::size_t>(week_indices[i] - t.first_week)][dominant[i]];
    }
    for (std::size_t w = 0; w < W; ++w) {
        t.week_starts.push_back(week_start(t.first_week + static_cast<int>(w), origin));
        const std::size_t total = t.row_total(w);
        t.empty.push_back(total == 0);
        std::vector<double> row(K, 0.0);
        if (total) {
            for (std::size_t k = 0; k < K; ++k) row[k] = 100.0 * static_cast<double>(t.counts[w][k]) / static_cast<double>(total);
        }
        t.values.push_back(std::move(row));
    }
    return t;
}

inline TrendMatrix topic_trend(const std::vector<DocTopics>& docs, const std::vector<int>& week_indices, std::size_t K,
                               Date origin = kDefaultWeekOrigin) {
    std::vector<std::size_t> dominant;
    dominant.reserve(docs.size());
    for (const auto& d : docs) dominant.push_back(d.dominant);
    return topic_trend(dominant, week_indices, K, origin);
}

/// Topic indices by value descending, lowest index first on ties, cut to m.
template <typename T>
std::vector<std::size_t> rank_topics(const std::vector<T>& row, std::size_t m) {
    std::vector<std::size_t> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    idx.resize(std::min(m, idx.size()));
    return idx;
}

/// Empty weeks yield an empty list.
inline std::vector<std::vector<std::size_t>> dominant_per_week(const TrendMatrix& trend, std::size_t m = 3) {
    if (trend.weeks() == 0) throw UsageError("dominant_per_week: empty trend");
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t w = 0; w < trend.weeks(); ++w) {
        out.push_back(trend.empty[w] ? std::vector<std::size_t>{} : rank_topics(trend.values[w], m));
    }
    return out;
}

struct TimelineEntry {
    Date start;
    Date end;
    std::string description;
};

using EventTimeline = std::vector<TimelineEntry>;

inline EventTimeline load_timeline(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot open timeline file '{}'", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
    }
    if (!j.is_array()) throw DataError(fmt::format("{}: timeline must be a JSON array", path.string()));
    EventTimeline t;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_object() || !e.contains("start") || !e.contains("end") || !e.contains("description")) {
            throw DataError(fmt::format("{}: entry {} needs start, end and description", path.string(), i));
        }
        TimelineEntry entry{parse_date(e["start"].get<std::string>()), parse_date(e["end"].get<std::string>()),
                            e["description"].get<std::string>()};
        if (entry.end < entry.start) {
            throw DataError(fmt::format("{}: entry {} ends before it starts", path.string(), i));
        }
        t.push_back(std::move(entry));
    }
    std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    return t;
}

struct AlignmentRow {
    Date start;
    Date end;
    std::string description;
    std::vector<std::size_t> topics;
    std::vector<std::string> themes;
    std::vector<std::size_t> counts;  // summed per-topic counts over the spanned weeks
    bool out_of_range = false;
};

inline std::vector<std::string> default_theme_names(std::size_t K) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < K; ++k) names.push_back(fmt::format("Topic {}", k + 1));
    return names;
}

/// Joins each timeline entry with the top-m topics over the weeks it
/// overlaps, ranked by counts summed across those weeks.
inline std::vector<AlignmentRow> align_events(const TrendMatrix& trend, const EventTimeline& timeline,
                                              const std::vector<std::string>& theme_names, std::size_t m = 3) {
    if (theme_names.size() != trend.K) {
        throw UsageError(fmt::format("align_events: {} theme names for {} topics", theme_names.size(), trend.K));
    }
    std::vector<AlignmentRow> rows;
    for (const auto& e : timeline) {
        AlignmentRow r{e.start, e.end, e.description, {}, {}, std::vector<std::size_t>(trend.K, 0), false};
        std::size_t total = 0;
        if (trend.weeks() > 0) {
            const int w0 = std::max(week_of(e.start, trend.origin), trend.first_week);
            const int w1 = std::min(week_of(e.end, trend.origin), trend.first_week + static_cast<int>(trend.weeks()) - 1);
            for (int w = w0; w <= w1; ++w) {
                const auto& row = trend.counts[static_cast<std::size_t>(w - trend.first_week)];
                for (std::size_t k = 0; k < trend.K; ++k) {
                    r.counts[k] += row[k];
                    total += row[k];
                }
            }
        }
        if (total == 0) {
            r.out_of_range = true;
        } else {
            r.topics = rank_topics(r.counts, m);
            for (auto k : r.topics) r.themes.push_back(theme_names[k]);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string trend_csv(const TrendMatrix& t) {
    std::string s = "week_start";
    for (std::size_t k = 0; k < t.K; ++k) s += fmt::format(",topic_{}", k);
    s += '\n';
    for (std::size_t w = 0; w < t.weeks(); ++w) {
        s += format_date(t.week_starts[w]);
        for (std::size_t k = 0; k < t.K; ++k) {
            s += ',';
            if (!t.empty[w]) s += fmt::format("{:.1f}", t.values[w][k]);
        }
        s += '\n';
    }
    return s;
}

inline std::string trend_counts_csv(const TrendMatrix& t) {
    std::string s = "week_start";
    for (std::size_t k = 0; k < t.K; ++k) s += fmt::format(",topic_{}", k);
    s += ",total\n";
    for (std::size_t w = 0; w < t.weeks(); ++w) {
        s += format_date(t.week_starts[w]);
        for (std::size_t k = 0; k < t.K; ++k) s += fmt::format(",{}", t.counts[w][k]);
        s += fmt::format(",{}\n", t.row_total(w));
    }
    return s;
}

inline std::string escape_markdown_cell(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n' || c == '\r') out += ' ';
        else out += c;
    }
    return out;
}

inline std::string alignment_markdown(const std::vector<AlignmentRow>& rows) {
    std::string md = "| Period | Prominent event | Trending topics |\n|---|---|---|\n";
    for (const auto& r : rows) {
        std::string themes;
        for (std::size_t i = 0; i < r.themes.size(); ++i) {
            if (i) themes += ", ";
            themes += escape_markdown_cell(r.themes[i]);
        }
        if (r.out_of_range) themes = "(outside corpus date range)";
        md += fmt::format("| {} to {} | {} | {} |\n", format_date(r.start), format_date(r.end),
                          escape_markdown_cell(r.description), themes);
    }
    return md;
}

}  // namespace tweetscope
