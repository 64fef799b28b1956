#pragma once

// Corpus readers and the blog-sentence preparation rules.
//
// JSONL: one JSON object per line with a string `text` field. Other scalar
// fields become metadata (numbers keep their JSON spelling). Recognised
// fields are validated: `date` must be ISO-8601, `latitude` a number in
// [-90, 90], `age` a non-negative integer. Invalid lines are skipped and
// reported by line number.
//
// Plain directory: every regular file directly inside the directory is one
// document, read in file-name order. Metadata comes from the file name,
// `<key>=<value>__<key>=<value>.txt`; segments without '=' are ignored and
// a trailing alphabetic extension is dropped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "hedono/dates.hpp"
#include "hedono/error.hpp"
#include "hedono/series.hpp"
#include "hedono/tokenize.hpp"

namespace hedono {

enum class CorpusFormat { Jsonl, PlainDir, Text };

/// jsonl for *.jsonl / *.ndjson, plain-dir for directories, otherwise a
/// single text document.
inline CorpusFormat detect_format(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return CorpusFormat::PlainDir;
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return CorpusFormat::Jsonl;
    return CorpusFormat::Text;
}

inline std::optional<CorpusFormat> parse_format(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::Jsonl;
    if (name == "plain-dir" || name == "dir") return CorpusFormat::PlainDir;
    if (name == "text") return CorpusFormat::Text;
    return std::nullopt;
}

/// Checks the metadata invariants; returns an error message or "".
inline std::string validate_meta(const Meta& meta) {
    if (const auto it = meta.find("date"); it != meta.end() && !dates::parse(it->second))
        return "invalid ISO-8601 date '" + it->second + "'";
    if (const auto it = meta.find("latitude"); it != meta.end()) {
        const auto v = detail::parse_double(it->second);
        if (!v || *v < -90.0 || *v > 90.0) return "latitude '" + it->second + "' outside [-90, 90]";
    }
    if (const auto it = meta.find("age"); it != meta.end()) {
        const auto v = detail::parse_double(it->second);
        if (!v || *v < 0 || *v != std::floor(*v)) return "age '" + it->second + "' is not a non-negative integer";
    }
    if (const auto it = meta.find("timezone"); it != meta.end() && !dates::parse_offset(it->second))
        return "invalid timezone offset '" + it->second + "'";
    return {};
}

/// Parses one JSONL line. Returns nullopt and sets `error` on failure.
inline std::optional<DocumentRecord> parse_jsonl_record(std::string_view line, std::string& error) {
    const auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded()) {
        error = "invalid JSON";
        return std::nullopt;
    }
    if (!j.is_object()) {
        error = "record is not a JSON object";
        return std::nullopt;
    }
    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) {
        error = "record has no string 'text' field";
        return std::nullopt;
    }
    DocumentRecord doc;
    doc.body = text->get<std::string>();
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "text") continue;
        const auto& v = it.value();
        if (v.is_string()) doc.meta[it.key()] = v.get<std::string>();
        else if (v.is_number() || v.is_boolean()) doc.meta[it.key()] = v.dump();
    }
    error = validate_meta(doc.meta);
    if (!error.empty()) return std::nullopt;
    return doc;
}

inline Meta meta_from_filename(std::string_view name) {
    if (const auto dot = name.rfind('.'); dot != std::string_view::npos && dot + 1 < name.size()) {
        const auto ext = name.substr(dot + 1);
        if (std::all_of(ext.begin(), ext.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }))
            name = name.substr(0, dot);
    }
    Meta meta;
    while (!name.empty()) {
        const auto sep = name.find("__");
        const std::string_view seg = sep == std::string_view::npos ? name : name.substr(0, sep);
        if (const auto eq = seg.find('='); eq != std::string_view::npos && eq > 0)
            meta[std::string(seg.substr(0, eq))] = std::string(seg.substr(eq + 1));
        if (sep == std::string_view::npos) break;
        name.remove_prefix(sep + 2);
    }
    return meta;
}

/// Streams DocumentRecords from disk without loading the whole corpus.
class CorpusReader {
public:
    struct Warning {
        std::size_t line;  // 0 for whole-file problems
        std::string message;
    };

    static constexpr std::size_t kMaxStoredWarnings = 100;

    CorpusReader(std::filesystem::path path, std::optional<CorpusFormat> format = std::nullopt)
        : path_(std::move(path)) {
        std::error_code ec;
        if (!std::filesystem::exists(path_, ec)) throw IoError("cannot read corpus '" + path_.string() + "'");
        format_ = format.value_or(detect_format(path_));
        if (format_ == CorpusFormat::PlainDir) {
            if (!std::filesystem::is_directory(path_)) throw IoError("'" + path_.string() + "' is not a directory");
            for (const auto& e : std::filesystem::directory_iterator(path_))
                if (e.is_regular_file()) files_.push_back(e.path());
            std::sort(files_.begin(), files_.end());
        } else {
            in_.open(path_, std::ios::binary);
            if (!in_) throw IoError("cannot open corpus '" + path_.string() + "'");
        }
    }

    CorpusFormat format() const noexcept { return format_; }

    std::optional<DocumentRecord> next() {
        switch (format_) {
            case CorpusFormat::Jsonl: return next_jsonl();
            case CorpusFormat::PlainDir: return next_file();
            case CorpusFormat::Text: return next_text();
        }
        return std::nullopt;
    }

    /// Reads up to `max` records into `out` (cleared first); false at end.
    bool next_batch(std::vector<DocumentRecord>& out, std::size_t max) {
        out.clear();
        while (out.size() < max) {
            auto d = next();
            if (!d) break;
            out.push_back(std::move(*d));
        }
        return !out.empty();
    }

    std::size_t records() const noexcept { return records_; }
    std::size_t skipped() const noexcept { return skipped_; }
    /// First kMaxStoredWarnings warnings; skipped() has the full count.
    const std::vector<Warning>& warnings() const noexcept { return warnings_; }

private:
    void warn(std::size_t line, std::string msg) {
        ++skipped_;
        if (warnings_.size() < kMaxStoredWarnings) warnings_.push_back({line, std::move(msg)});
    }

    std::optional<DocumentRecord> next_jsonl() {
        std::string line, error;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            if (auto doc = parse_jsonl_record(line, error)) {
                ++records_;
                return doc;
            }
            warn(line_no_, error);
        }
        return std::nullopt;
    }

    static std::string slurp(const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        if (!f) throw IoError("cannot open '" + p.string() + "'");
        return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    }

    std::optional<DocumentRecord> next_file() {
        while (file_pos_ < files_.size()) {
            const auto& p = files_[file_pos_++];
            DocumentRecord doc;
            doc.meta = meta_from_filename(p.filename().string());
            if (auto err = validate_meta(doc.meta); !err.empty()) {
                warn(0, p.filename().string() + ": " + err);
                continue;
            }
            doc.body = slurp(p);
            ++records_;
            return doc;
        }
        return std::nullopt;
    }

    std::optional<DocumentRecord> next_text() {
        if (text_done_) return std::nullopt;
        text_done_ = true;
        DocumentRecord doc;
        doc.body = std::string(std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>());
        ++records_;
        return doc;
    }

    std::filesystem::path path_;
    CorpusFormat format_ = CorpusFormat::Text;
    std::ifstream in_;
    std::vector<std::filesystem::path> files_;
    std::size_t file_pos_ = 0;
    std::size_t line_no_ = 0;
    bool text_done_ = false;
    std::size_t records_ = 0;
    std::size_t skipped_ = 0;
    std::vector<Warning> warnings_;
};

/// Reads a whole corpus into memory (small corpora and tests).
inline std::vector<DocumentRecord> read_corpus(const std::filesystem::path& path,
                                               std::optional<CorpusFormat> format = std::nullopt,
                                               std::vector<CorpusReader::Warning>* warnings = nullptr) {
    CorpusReader reader(path, format);
    std::vector<DocumentRecord> out;
    while (auto d = reader.next()) out.push_back(std::move(*d));
    if (warnings) *warnings = reader.warnings();
    return out;
}

/// Splits after '.', '!' or '?' when followed by whitespace or the end of
/// the text. Naive by design: "Dr. Smith" splits after "Dr.".
inline std::vector<std::string> segment_sentences(std::string_view text) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    std::vector<std::string> out;
    auto emit = [&](std::string_view s) {
        s = detail::trim(s);
        while (!s.empty() && (s.back() == '\f' || s.back() == '\v')) s.remove_suffix(1);
        if (!s.empty()) out.emplace_back(s);
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1]))) {
            emit(text.substr(start, i + 1 - start));
            start = i + 1;
        }
    }
    if (start < text.size()) emit(text.substr(start));
    return out;
}

inline constexpr std::string_view kFirstPersonPronouns[] = {"i", "we", "me", "my", "our", "us"};
inline constexpr std::string_view kFeelForms[] = {"feel", "feels", "felt", "feeling", "feelings"};

/// True when the sentence has a first-person pronoun token and a form of
/// "feel" as a token.
inline bool is_feel_sentence(std::string_view sentence) {
    bool pronoun = false, feel = false;
    for_each_token(sentence, [&](std::string_view t) {
        if (!pronoun && std::find(std::begin(kFirstPersonPronouns), std::end(kFirstPersonPronouns), t) !=
                            std::end(kFirstPersonPronouns))
            pronoun = true;
        if (!feel && std::find(std::begin(kFeelForms), std::end(kFeelForms), t) != std::end(kFeelForms))
            feel = true;
    });
    return pronoun && feel;
}

inline std::vector<std::string> feel_filter(std::span<const std::string> sentences) {
    std::vector<std::string> out;
    for (const auto& s : sentences)
        if (is_feel_sentence(s)) out.push_back(s);
    return out;
}

inline constexpr std::size_t kDedupMinTokens = 6;

/// Drops a sentence when a sentence with the same token sequence, at least
/// kDedupMinTokens tokens long, was already seen on the same calendar day.
/// Records without a usable date pass through and are counted.
class DayDeduper {
public:
    bool keep(const DocumentRecord& doc) {
        const std::string* text = doc.text();
        const auto day = keys::detail::day_of(doc.meta);
        if (!day) {
            ++undated_;
            return true;
        }
        if (!text) return true;
        std::string key;
        std::size_t n = 0;
        for_each_token(*text, [&](std::string_view t) {
            key.append(t);
            key.push_back(' ');
            ++n;
        });
        if (n < kDedupMinTokens) return true;
        return seen_[day->time_since_epoch().count()].insert(std::move(key)).second;
    }

    std::size_t undated() const noexcept { return undated_; }

private:
    std::unordered_map<long, std::unordered_set<std::string>> seen_;
    std::size_t undated_ = 0;
};

inline std::vector<DocumentRecord> dedup_day(std::span<const DocumentRecord> docs, std::size_t* undated = nullptr) {
    DayDeduper d;
    std::vector<DocumentRecord> out;
    for (const auto& doc : docs)
        if (d.keep(doc)) out.push_back(doc);
    if (undated) *undated += d.undated();
    return out;
}

/// JSONL line for a record: `text` plus every metadata field, keys sorted.
/// Metadata that looks like a JSON number is written as a number.
inline std::string to_jsonl(const DocumentRecord& doc) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : doc.meta) {
        if (detail::parse_double(v) && v.find_first_not_of("-0123456789.eE+") == std::string::npos)
            j[k] = nlohmann::json::parse(v, nullptr, false);
        else
            j[k] = v;
        if (j[k].is_discarded()) j[k] = v;
    }
    if (const auto* t = doc.text()) j["text"] = *t;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace hedono
