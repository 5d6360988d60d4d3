#pragma once

// Document ingestion and the text-cleaning pipeline:
// normalize -> tokenize -> remove_stopwords -> stem, then corpus-level
// deduplication.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tweetscope/dates.hpp"
#include "tweetscope/error.hpp"
#include "tweetscope/porter.hpp"

namespace tweetscope {

enum class Label { Irrelevant = 0, Relevant = 1 };

inline std::string_view to_string(Label l) { return l == Label::Relevant ? "relevant" : "irrelevant"; }

inline std::optional<Label> parse_label(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "relevant") return Label::Relevant;
    if (lower == "irrelevant") return Label::Irrelevant;
    return std::nullopt;
}

struct RawDocument {
    std::string id;
    std::string text;
    Timestamp timestamp{};
    std::optional<Label> label;
};

struct CleanDocument {
    std::string id;
    std::vector<std::string> tokens;
    Timestamp timestamp{};
    std::optional<Label> label;
    std::optional<int> week_index;  // filled in by the trends stage
};

using TermSet = std::set<std::string, std::less<>>;

struct PreprocessConfig {
    TermSet stopwords;
    TermSet collection_keywords{"coronavirus", "covid-19", "sars-ncov"};
    bool strip_urls = true;
    bool strip_mentions_hashmarks = true;
    bool strip_non_ascii = true;
    int min_tokens = 1;
    // Optional study window [start, end]; documents outside are dropped.
    std::optional<Date> window_start;
    std::optional<Date> window_end;
};

enum class CorpusFormat { Jsonl, Csv };

inline CorpusFormat format_from_path(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".csv" || ext == ".CSV") return CorpusFormat::Csv;
    return CorpusFormat::Jsonl;
}

/// One lowercase term per line; blank lines and `#` comments are skipped.
inline TermSet load_term_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot open term list '{}'", path.string()));
    TermSet out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t");
        std::string term = line.substr(b, e - b + 1);
        std::transform(term.begin(), term.end(), term.begin(), [](unsigned char c) { return std::tolower(c); });
        out.insert(std::move(term));
    }
    return out;
}

namespace detail {

inline void check_unique(std::unordered_set<std::string>& seen, const std::string& id, std::size_t line) {
    if (!seen.insert(id).second) throw DataError(fmt::format("line {}: duplicate id \"{}\"", line, id));
}

inline RawDocument make_raw(std::string id, std::string text, std::string_view ts, std::string_view label,
                            std::size_t line) {
    if (id.empty()) throw DataError(fmt::format("line {}: missing id", line));
    RawDocument doc;
    doc.id = std::move(id);
    doc.text = std::move(text);
    try {
        doc.timestamp = parse_rfc3339(ts);
    } catch (const DataError& e) {
        throw DataError(fmt::format("line {}: {}", line, e.what()));
    }
    if (!label.empty()) {
        doc.label = parse_label(label);
        if (!doc.label) throw DataError(fmt::format("line {}: unknown label '{}'", line, label));
    }
    return doc;
}

inline std::vector<RawDocument> load_jsonl(std::istream& in) {
    std::vector<RawDocument> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(fmt::format("line {}: malformed JSON: {}", lineno, e.what()));
        }
        if (!j.is_object()) throw DataError(fmt::format("line {}: record is not an object", lineno));
        auto str_field = [&](const char* name, bool required) -> std::string {
            auto it = j.find(name);
            if (it == j.end() || it->is_null()) {
                if (required) throw DataError(fmt::format("line {}: missing field '{}'", lineno, name));
                return {};
            }
            if (!it->is_string()) throw DataError(fmt::format("line {}: field '{}' must be a string", lineno, name));
            return it->get<std::string>();
        };
        auto doc = make_raw(str_field("id", true), str_field("text", true), str_field("ts", true),
                            str_field("label", false), lineno);
        check_unique(seen, doc.id, lineno);
        docs.push_back(std::move(doc));
    }
    return docs;
}

// RFC 4180 record reader. Returns false at end of input. Quoted fields may
// span lines; `line` tracks the physical line where the record started.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    const std::size_t start_line = line + 1;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (c == '\r') {
            continue;
        } else if (c == '\n') {
            ++line;
            fields.push_back(std::move(field));
            return true;
        } else if (c == '"' && field.empty() && !after_quote) {
            quoted = true;
        } else if (after_quote) {
            throw DataError(fmt::format("line {}: unexpected character after closing quote", start_line));
        } else {
            field += c;
        }
    }
    if (quoted) throw DataError(fmt::format("line {}: unterminated quoted field", start_line));
    ++line;
    fields.push_back(std::move(field));
    return true;
}

inline std::vector<RawDocument> load_csv(std::istream& in) {
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!read_csv_record(in, fields, line)) return {};
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
    for (const char* required : {"id", "text", "ts"}) {
        if (!col.count(required)) throw DataError(fmt::format("line 1: CSV header lacks column '{}'", required));
    }
    const auto label_col = col.count("label") ? std::optional<std::size_t>(col["label"]) : std::nullopt;

    std::vector<RawDocument> docs;
    std::unordered_set<std::string> seen;
    while (true) {
        const std::size_t record_line = line + 1;
        if (!read_csv_record(in, fields, line)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != col.size()) {
            throw DataError(fmt::format("line {}: expected {} fields, found {}", record_line, col.size(), fields.size()));
        }
        auto doc = make_raw(fields[col["id"]], fields[col["text"]], fields[col["ts"]],
                            label_col ? std::string_view(fields[*label_col]) : std::string_view{}, record_line);
        check_unique(seen, doc.id, record_line);
        docs.push_back(std::move(doc));
    }
    return docs;
}

inline bool is_alnum_ascii(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

inline bool starts_url(std::string_view s, std::size_t pos) {
    auto sub = s.substr(pos);
    return sub.rfind("http://", 0) == 0 || sub.rfind("https://", 0) == 0 || sub.rfind("www.", 0) == 0;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

// Token with leading/trailing characters outside [a-z0-9] removed.
inline std::string_view core_of(std::string_view tok) {
    std::size_t b = 0, e = tok.size();
    while (b < e && !is_alnum_ascii(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && !is_alnum_ascii(static_cast<unsigned char>(tok[e - 1]))) --e;
    return tok.substr(b, e - b);
}

}  // namespace detail

/// Loads raw documents in file order. Throws UsageError if the file cannot
/// be opened and DataError (with line number) for malformed records.
inline std::vector<RawDocument> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(fmt::format("cannot open corpus '{}'", path.string()));
    try {
        return format == CorpusFormat::Csv ? detail::load_csv(in) : detail::load_jsonl(in);
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

inline std::vector<RawDocument> load_corpus(const std::filesystem::path& path) {
    return load_corpus(path, format_from_path(path));
}

/// Lowercases and strips URLs, '#'/'@', punctuation, emoji and collection
/// keywords. Output alphabet is [a-z0-9] plus word-internal apostrophes,
/// tokens separated by single spaces. Idempotent.
inline std::string normalize(std::string_view text, const PreprocessConfig& config) {
    std::string lower;
    lower.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        // U+2018 / U+2019 typographic apostrophes.
        if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 || static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            lower += '\'';
            i += 2;
            continue;
        }
        lower += (c < 0x80) ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    }

    auto is_keyword = [&](std::string_view t) { return config.collection_keywords.count(t) > 0; };

    std::string cleaned;
    cleaned.reserve(lower.size());
    for (std::string_view tok : detail::split_ws(lower)) {
        if (config.strip_urls) {
            for (std::size_t p = 0; p < tok.size(); ++p) {
                if ((p == 0 || !detail::is_alnum_ascii(static_cast<unsigned char>(tok[p - 1]))) &&
                    detail::starts_url(tok, p)) {
                    tok = tok.substr(0, p);
                    break;
                }
            }
        }
        if (is_keyword(detail::core_of(tok))) continue;
        for (unsigned char c : tok) {
            if (detail::is_alnum_ascii(c) || c == '\'') {
                cleaned += static_cast<char>(c);
            } else if (c == '#' || c == '@') {
                if (!config.strip_mentions_hashmarks) cleaned += static_cast<char>(c);
            } else if (c >= 0x80) {
                cleaned += config.strip_non_ascii ? ' ' : static_cast<char>(c);
            } else {
                cleaned += ' ';
            }
        }
        cleaned += ' ';
    }

    // Keep apostrophes only between word characters, and drop keywords that
    // the punctuation pass exposed.
    std::string out;
    out.reserve(cleaned.size());
    for (std::string_view piece : detail::split_ws(cleaned)) {
        std::string word;
        std::size_t b = piece.find_first_not_of('\'');
        if (b == std::string_view::npos) continue;
        std::size_t e = piece.find_last_not_of('\'');
        piece = piece.substr(b, e - b + 1);
        for (std::size_t i = 0; i < piece.size(); ++i) {
            if (piece[i] == '\'' && !word.empty() && word.back() == '\'') continue;
            word += piece[i];
        }
        if (word.empty() || is_keyword(word)) continue;
        if (!out.empty()) out += ' ';
        out += word;
    }
    return out;
}

/// Whitespace tokenization with Penn Treebank contraction splitting
/// ("don't" -> "do" "n't", "it's" -> "it" "'s", "cannot" -> "can" "not").
inline std::vector<std::string> tokenize(std::string_view text) {
    static constexpr std::string_view kClitics[] = {"'ll", "'re", "'ve", "'s", "'m", "'d"};
    static const std::map<std::string_view, std::pair<std::string_view, std::string_view>> kSplits = {
        {"cannot", {"can", "not"}}, {"d'ye", {"d", "'ye"}},  {"gimme", {"gim", "me"}}, {"gonna", {"gon", "na"}},
        {"gotta", {"got", "ta"}},   {"lemme", {"lem", "me"}}, {"more'n", {"more", "'n"}}, {"wanna", {"wan", "na"}},
        {"'tis", {"'t", "is"}},     {"'twas", {"'t", "was"}},
    };

    std::vector<std::string> out;
    auto emit = [&](std::string_view piece) {
        if (piece.empty()) return;
        if (auto it = kSplits.find(piece); it != kSplits.end()) {
            out.emplace_back(it->second.first);
            out.emplace_back(it->second.second);
        } else {
            out.emplace_back(piece);
        }
    };
    for (std::string_view tok : detail::split_ws(text)) {
        if (tok.size() > 3 && tok.substr(tok.size() - 3) == "n't") {
            emit(tok.substr(0, tok.size() - 3));
            out.emplace_back("n't");
            continue;
        }
        bool split = false;
        for (std::string_view cl : kClitics) {
            if (tok.size() > cl.size() && tok.substr(tok.size() - cl.size()) == cl) {
                emit(tok.substr(0, tok.size() - cl.size()));
                out.emplace_back(cl);
                split = true;
                break;
            }
        }
        if (!split) emit(tok);
    }
    return out;
}

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const TermSet& stoplist) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!stoplist.count(t)) out.push_back(t);
    }
    return out;
}

inline std::string stem(std::string_view token) { return porter_stem(token); }

/// Full per-document pipeline. Returns nullopt when fewer than
/// `config.min_tokens` tokens survive or the document is outside the study
/// window. A stem that collapses onto a stopword or keyword ("ones" -> "on")
/// is dropped as well.
inline std::optional<CleanDocument> preprocess(const RawDocument& raw, const PreprocessConfig& config) {
    if (config.window_start && date_of(raw.timestamp) < *config.window_start) return std::nullopt;
    if (config.window_end && date_of(raw.timestamp) > *config.window_end) return std::nullopt;

    const auto kept = remove_stopwords(tokenize(normalize(raw.text, config)), config.stopwords);
    CleanDocument doc;
    doc.id = raw.id;
    doc.timestamp = raw.timestamp;
    doc.label = raw.label;
    doc.tokens.reserve(kept.size());
    for (const auto& t : kept) {
        std::string s = stem(t);
        if (s.empty() || config.stopwords.count(s) || config.collection_keywords.count(s)) continue;
        doc.tokens.push_back(std::move(s));
    }
    if (static_cast<int>(doc.tokens.size()) < config.min_tokens) return std::nullopt;
    return doc;
}

/// Keeps the earliest-timestamp document for each distinct token sequence
/// (earliest position on timestamp ties) and drops documents shorter than
/// `min_tokens`. Survivors stay in input order.
inline std::vector<CleanDocument> deduplicate(const std::vector<CleanDocument>& docs, int min_tokens = 1) {
    std::map<std::vector<std::string>, std::size_t> winner;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (static_cast<int>(docs[i].tokens.size()) < min_tokens) continue;
        auto [it, inserted] = winner.emplace(docs[i].tokens, i);
        if (!inserted && docs[i].timestamp < docs[it->second].timestamp) it->second = i;
    }
    std::vector<bool> keep(docs.size(), false);
    for (const auto& [tokens, idx] : winner) keep[idx] = true;
    std::vector<CleanDocument> out;
    out.reserve(winner.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (keep[i]) out.push_back(docs[i]);
    }
    return out;
}

struct PreprocessStats {
    std::size_t total = 0;
    std::size_t dropped_empty = 0;      // too few tokens after cleaning, or outside the window
    std::size_t dropped_duplicate = 0;
    std::size_t unique = 0;
    std::size_t raw_relevant = 0;
    std::size_t raw_irrelevant = 0;
    std::size_t relevant = 0;  // among survivors
    std::size_t irrelevant = 0;
};

inline nlohmann::json to_json(const PreprocessStats& s) {
    return {{"total", s.total},
            {"dropped_empty", s.dropped_empty},
            {"dropped_duplicate", s.dropped_duplicate},
            {"unique", s.unique},
            {"labels_raw", {{"relevant", s.raw_relevant}, {"irrelevant", s.raw_irrelevant}}},
            {"labels_clean", {{"relevant", s.relevant}, {"irrelevant", s.irrelevant}}}};
}

struct PreprocessResult {
    std::vector<CleanDocument> docs;
    PreprocessStats stats;
};

inline PreprocessResult preprocess_corpus(const std::vector<RawDocument>& raw, const PreprocessConfig& config) {
    PreprocessResult r;
    r.stats.total = raw.size();
    std::vector<CleanDocument> cleaned;
    cleaned.reserve(raw.size());
    for (const auto& doc : raw) {
        if (doc.label) ++(*doc.label == Label::Relevant ? r.stats.raw_relevant : r.stats.raw_irrelevant);
        if (auto c = preprocess(doc, config)) {
            cleaned.push_back(std::move(*c));
        } else {
            ++r.stats.dropped_empty;
        }
    }
    r.docs = deduplicate(cleaned, config.min_tokens);
    r.stats.dropped_duplicate = cleaned.size() - r.docs.size();
    r.stats.unique = r.docs.size();
    for (const auto& d : r.docs) {
        if (d.label) ++(*d.label == Label::Relevant ? r.stats.relevant : r.stats.irrelevant);
    }
    return r;
}

inline nlohmann::json to_json(const CleanDocument& d) {
    nlohmann::json j = {{"id", d.id}, {"tokens", d.tokens}, {"ts", format_rfc3339(d.timestamp)}};
    if (d.label) j["label"] = std::string(to_string(*d.label));
    return j;
}

inline void write_clean_jsonl(const std::filesystem::path& path, const std::vector<CleanDocument>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError(fmt::format("cannot write '{}'", path.string()));
    for (const auto& d : docs) out << to_json(d).dump() << '\n';
}

inline std::vector<CleanDocument> read_clean_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(fmt::format("cannot open cleaned corpus '{}'", path.string()));
    std::vector<CleanDocument> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            CleanDocument d;
            d.id = j.at("id").get<std::string>();
            d.tokens = j.at("tokens").get<std::vector<std::string>>();
            d.timestamp = parse_rfc3339(j.at("ts").get<std::string>());
            if (auto it = j.find("label"); it != j.end() && !it->is_null()) d.label = parse_label(it->get<std::string>());
            docs.push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
        }
    }
    return docs;
}

}  // namespace tweetscope
