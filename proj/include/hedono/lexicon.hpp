#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hedono/error.hpp"
#include "hedono/random.hpp"
#include "hedono/unicode.hpp"

namespace hedono {

inline constexpr double kMinValence = 1.0;
inline constexpr double kMaxValence = 9.0;

struct LexiconEntry {
    std::string word;
    double valence = 0.0;
    std::optional<double> valence_sd;

    friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

namespace detail {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

struct LexiconData {
    std::vector<LexiconEntry> entries;  // ascending by word
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> index;
    std::uint64_t fingerprint = 0;
};

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

/// Immutable word -> mean valence table.
///
/// A Lexicon is a cheap handle onto shared immutable data; copies share the
/// table and are safe to read from any number of threads. Entries are kept
/// in ascending byte order of the word, and that order is the fixed
/// summation order used by scoring. Each lexicon carries a content
/// fingerprint so frequency vectors built against different tables can be
/// told apart.
class Lexicon {
public:
    /// Validates and takes ownership of the entries. Words are case-folded;
    /// throws ValidationError on an empty table, empty or whitespace-bearing
    /// words, valences outside [1, 9], negative standard deviations or
    /// duplicate words.
    static Lexicon from_entries(std::vector<LexiconEntry> entries) {
        if (entries.empty()) throw ValidationError("lexicon must contain at least one word");
        for (auto& e : entries) {
            e.word = unicode::fold_case(e.word);
            if (e.word.empty()) throw ValidationError("lexicon word is empty");
            if (e.word.find_first_of(" \t\r\n\v\f") != std::string::npos)
                throw ValidationError("lexicon word '" + e.word + "' contains whitespace");
            if (!(e.valence >= kMinValence && e.valence <= kMaxValence))
                throw ValidationError("valence for '" + e.word + "' is outside [1, 9]");
            if (e.valence_sd && !(*e.valence_sd >= 0.0 && std::isfinite(*e.valence_sd)))
                throw ValidationError("valence_sd for '" + e.word + "' must be a finite value >= 0");
        }
        std::sort(entries.begin(), entries.end(),
                  [](const LexiconEntry& a, const LexiconEntry& b) { return a.word < b.word; });
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].word == entries[i - 1].word)
                throw ValidationError("duplicate lexicon word '" + entries[i].word + "'");

        auto data = std::make_shared<detail::LexiconData>();
        data->index.reserve(entries.size());
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            data->index.emplace(entries[i].word, static_cast<std::uint32_t>(i));
            h = detail::fnv1a(h, entries[i].word);
            const auto bits = std::bit_cast<std::uint64_t>(entries[i].valence);
            h = detail::fnv1a(h, std::string_view(reinterpret_cast<const char*>(&bits), sizeof bits));
        }
        data->fingerprint = h;
        data->entries = std::move(entries);
        return Lexicon(std::move(data));
    }

    std::size_t size() const noexcept { return data_->entries.size(); }
    std::span<const LexiconEntry> entries() const noexcept { return data_->entries; }
    const LexiconEntry& entry(std::uint32_t i) const { return data_->entries[i]; }
    std::uint64_t fingerprint() const noexcept { return data_->fingerprint; }

    /// Valence of `word` after case-folding; nullopt when not listed.
    std::optional<double> lookup(std::string_view word) const {
        const auto idx = index_of(word);
        if (!idx) return std::nullopt;
        return data_->entries[*idx].valence;
    }

    std::optional<std::uint32_t> index_of(std::string_view word) const {
        if (word.empty()) return std::nullopt;
        const bool folded = std::none_of(word.begin(), word.end(), [](char c) {
            return (c >= 'A' && c <= 'Z') || static_cast<unsigned char>(c) >= 0x80;
        });
        if (folded) return index_of_folded(word);
        return index_of_folded(unicode::fold_case(word));
    }

    /// Lookup for tokens that are already case-folded (the tokenizer's output).
    std::optional<std::uint32_t> index_of_folded(std::string_view word) const {
        const auto it = data_->index.find(word);
        if (it == data_->index.end()) return std::nullopt;
        return it->second;
    }

    bool contains(std::string_view word) const { return index_of(word).has_value(); }

    friend bool operator==(const Lexicon& a, const Lexicon& b) {
        return a.data_ == b.data_ ||
               (a.fingerprint() == b.fingerprint() && a.data_->entries == b.data_->entries);
    }

private:
    explicit Lexicon(std::shared_ptr<const detail::LexiconData> data) : data_(std::move(data)) {}

    std::shared_ptr<const detail::LexiconData> data_;
};

namespace detail {

inline std::vector<std::string> split_delimited(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Quotes a CSV field when it contains a delimiter, quote or line break.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

/// Reads a delimited lexicon: UTF-8, header row first, tab or comma
/// separated (detected from the header), columns `word` and `valence`
/// required, `valence_sd` optional, any other columns ignored.
inline Lexicon load_lexicon(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<char> delim;
    std::size_t n_cols = 0, word_col = 0, valence_col = 0;
    std::optional<std::size_t> sd_col;
    std::vector<LexiconEntry> entries;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;

        if (!delim) {
            delim = line.find('\t') != std::string::npos ? '\t' : ',';
            const auto header = detail::split_delimited(line, *delim);
            n_cols = header.size();
            std::optional<std::size_t> w, v;
            for (std::size_t i = 0; i < header.size(); ++i) {
                const std::string name = unicode::fold_case(detail::trim(header[i]));
                if (name == "word") w = i;
                else if (name == "valence") v = i;
                else if (name == "valence_sd") sd_col = i;
            }
            if (!w || !v) throw ParseError("header must name columns 'word' and 'valence'", line_no);
            word_col = *w;
            valence_col = *v;
            continue;
        }

        const auto fields = detail::split_delimited(line, *delim);
        if (fields.size() != n_cols)
            throw ParseError("expected " + std::to_string(n_cols) + " columns, found " +
                                 std::to_string(fields.size()),
                             line_no);
        LexiconEntry e;
        e.word = std::string(detail::trim(fields[word_col]));
        const auto v = detail::parse_double(fields[valence_col]);
        if (!v) throw ParseError("non-numeric valence '" + fields[valence_col] + "'", line_no);
        e.valence = *v;
        if (sd_col && !detail::trim(fields[*sd_col]).empty()) {
            const auto sd = detail::parse_double(fields[*sd_col]);
            if (!sd) throw ParseError("non-numeric valence_sd '" + fields[*sd_col] + "'", line_no);
            e.valence_sd = *sd;
        }
        if (!(e.valence >= kMinValence && e.valence <= kMaxValence))
            throw ValidationError("line " + std::to_string(line_no) + ": valence " + fields[valence_col] +
                                  " for '" + e.word + "' is outside [1, 9]");
        entries.push_back(std::move(e));
    }
    if (!delim) throw ParseError("lexicon is empty (no header row)");
    return Lexicon::from_entries(std::move(entries));
}

inline Lexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon '" + path + "'");
    return load_lexicon(in);
}

/// Tab-separated, shortest round-trip decimal representation.
inline void write_lexicon(std::ostream& out, const Lexicon& lex) {
    const bool with_sd = std::any_of(lex.entries().begin(), lex.entries().end(),
                                     [](const LexiconEntry& e) { return e.valence_sd.has_value(); });
    out << "word\tvalence" << (with_sd ? "\tvalence_sd" : "") << '\n';
    for (const auto& e : lex.entries()) {
        out << e.word << '\t' << detail::format_double(e.valence);
        if (with_sd) out << '\t' << (e.valence_sd ? detail::format_double(*e.valence_sd) : "");
        out << '\n';
    }
}

/// Uniform random m-subset drawn without replacement by a partial
/// Fisher-Yates shuffle over the entry indices, using the engine from
/// `random::make_engine(seed)`.
inline Lexicon subsample(const Lexicon& lex, std::size_t m, random::Engine& rng) {
    if (m == 0) throw ArgumentError("subset size must be positive");
    if (m > lex.size())
        throw ArgumentError("subset size " + std::to_string(m) + " exceeds lexicon size " +
                            std::to_string(lex.size()));
    std::vector<std::uint32_t> idx(lex.size());
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + random::uniform_below(rng, idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    std::vector<LexiconEntry> picked;
    picked.reserve(m);
    for (auto i : idx) picked.push_back(lex.entry(i));
    return Lexicon::from_entries(std::move(picked));
}

inline Lexicon subsample(const Lexicon& lex, std::size_t m, std::uint64_t seed) {
    auto rng = random::make_engine(seed);
    return subsample(lex, m, rng);
}

/// Counts lexicon valences per bin. A value on an interior edge falls in
/// the higher bin; a value equal to the last edge falls in the last bin.
inline std::vector<std::size_t> valence_histogram(const Lexicon& lex, std::span<const double> edges) {
    if (edges.size() < 2) throw ArgumentError("histogram needs at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw ArgumentError("bin edges must be strictly ascending");
    if (edges.front() > kMinValence || edges.back() < kMaxValence)
        throw ArgumentError("bin edges must cover [1, 9]");

    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (const auto& e : lex.entries()) {
        auto it = std::upper_bound(edges.begin(), edges.end(), e.valence);
        auto bin = static_cast<std::size_t>(it - edges.begin());
        bin = std::clamp<std::size_t>(bin, 1, counts.size()) - 1;
        ++counts[bin];
    }
    return counts;
}

}  // namespace hedono
