#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hedono/dates.hpp"
#include "hedono/error.hpp"
#include "hedono/lexicon.hpp"
#include "hedono/parallel.hpp"
#include "hedono/score.hpp"
#include "hedono/tokenize.hpp"

namespace hedono {

using Meta = std::map<std::string, std::string, std::less<>>;

/// One document: raw text or a precomputed frequency vector, plus metadata.
struct DocumentRecord {
    std::variant<std::string, FrequencyVector> body;
    Meta meta;

    const std::string* text() const { return std::get_if<std::string>(&body); }

    std::string_view get(std::string_view key) const {
        const auto it = meta.find(key);
        return it == meta.end() ? std::string_view{} : std::string_view(it->second);
    }
};

inline FrequencyVector vectorize(const DocumentRecord& doc, const Lexicon& lex) {
    if (const auto* t = doc.text()) return count_text(*t, lex);
    const auto& v = std::get<FrequencyVector>(doc.body);
    if (v.bound() && !(v.lexicon() == lex))
        throw ArgumentError("document vector was built against a different lexicon");
    return v;
}

struct AgeRange {
    long lo = 0;
    long hi = 0;
};

struct SeriesBin {
    std::string key;
    std::optional<ValenceScore> score;  // present iff valid
    std::uint64_t anew_words = 0;
    bool valid = false;
    std::size_t docs = 0;
    FrequencyVector pooled;
    std::optional<AgeRange> ages;  // set by adaptive_age_bins
};

inline constexpr std::string_view kUnknownLabel = "unknown";

namespace detail {

inline std::optional<double> leading_number(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') ++i;
    const std::size_t digits_start = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == digits_start) return std::nullopt;
    if (i + 1 < s.size() && s[i] == '.' && s[i + 1] >= '0' && s[i + 1] <= '9') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    }
    return parse_double(s.substr(0, i));
}

// Digit runs compare by numeric value, everything else bytewise.
inline int natural_compare(std::string_view a, std::string_view b) {
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && is_digit(a[ie])) ++ie;
            while (je < b.size() && is_digit(b[je])) ++je;
            auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
            while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
            while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
            if (na.size() != nb.size()) return na.size() < nb.size() ? -1 : 1;
            if (const int c = na.compare(nb)) return c < 0 ? -1 : 1;
            i = ie, j = je;
        } else {
            if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]) ? -1 : 1;
            ++i, ++j;
        }
    }
    if (i < a.size()) return 1;
    if (j < b.size()) return -1;
    return 0;
}

}  // namespace detail

/// Ordering for bin labels: labels that start with a number (years, signed
/// ranges like "-20..-10", ages, "3-Wed") sort numerically by that number
/// and come before other labels; remaining ties use natural order, then
/// bytes.
struct LabelLess {
    bool operator()(std::string_view a, std::string_view b) const {
        const auto na = detail::leading_number(a), nb = detail::leading_number(b);
        if (na.has_value() != nb.has_value()) return na.has_value();
        if (na && *na != *nb) return *na < *nb;
        if (const int c = detail::natural_compare(a, b)) return c < 0;
        return a < b;
    }
};

using KeyFn = std::function<std::string(const Meta&)>;

/// Standard grouping keys. Each returns "" when the document lacks the
/// needed metadata; bin_series files those under "unknown".
namespace keys {

inline KeyFn field(std::string name) {
    return [name = std::move(name)](const Meta& m) {
        const auto it = m.find(name);
        return it == m.end() ? std::string{} : it->second;
    };
}

namespace detail {

inline std::optional<std::chrono::sys_days> day_of(const Meta& m) {
    const auto it = m.find("date");
    if (it == m.end() || it->second.empty()) return std::nullopt;
    const auto ts = dates::parse(it->second);
    if (!ts) return std::nullopt;
    std::optional<int> tz;
    if (const auto z = m.find("timezone"); z != m.end() && !z->second.empty()) tz = dates::parse_offset(z->second);
    return dates::local_day(*ts, tz);
}

}  // namespace detail

/// `year` metadata when present, else the year of `date`.
inline KeyFn year() {
    return [](const Meta& m) -> std::string {
        if (const auto it = m.find("year"); it != m.end() && !it->second.empty()) return it->second;
        const auto d = detail::day_of(m);
        return d ? dates::format_day(*d).substr(0, 4) : std::string{};
    };
}

inline KeyFn month() {
    return [](const Meta& m) -> std::string {
        const auto d = detail::day_of(m);
        return d ? dates::format_day(*d).substr(0, 7) : std::string{};
    };
}

inline KeyFn day() {
    return [](const Meta& m) -> std::string {
        const auto d = detail::day_of(m);
        return d ? dates::format_day(*d) : std::string{};
    };
}

/// "1-Mon" ... "7-Sun" so labels sort in week order.
inline KeyFn weekday() {
    return [](const Meta& m) -> std::string {
        static constexpr const char* names[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
        const auto d = detail::day_of(m);
        if (!d) return {};
        const unsigned w = dates::iso_weekday(*d);
        return std::to_string(w) + "-" + names[w - 1];
    };
}

/// Fixed-width numeric ranges of a field, labelled "lo..hi" with
/// lo = floor(value / width) * width.
inline KeyFn numeric_range(std::string name, double width) {
    if (!(width > 0)) throw ArgumentError("bin width must be positive");
    return [name = std::move(name), width](const Meta& m) -> std::string {
        const auto it = m.find(name);
        if (it == m.end()) return {};
        const auto v = hedono::detail::parse_double(it->second);
        if (!v) return {};
        const double lo = std::floor(*v / width) * width;
        return hedono::detail::format_double(lo + 0.0) + ".." + hedono::detail::format_double(lo + width);
    };
}

/// Resolves a grouping name: year, month, day, weekday, or any metadata
/// field. A positive `width` turns a numeric field into ranges.
inline KeyFn by_name(const std::string& name, double width = 0) {
    if (width > 0) return numeric_range(name, width);
    if (name == "year") return year();
    if (name == "month") return month();
    if (name == "day" || name == "date") return day();
    if (name == "weekday") return weekday();
    return field(name);
}

}  // namespace keys

/// Per-label pooled counts. Feed vectors in any order, from any number of
/// builders merged together; the result depends only on the multiset of
/// (label, vector) pairs.
class SeriesBuilder {
public:
    struct Group {
        FrequencyVector pooled;
        std::size_t docs = 0;
    };

    void add(std::string label, const FrequencyVector& v) {
        if (label.empty()) label = kUnknownLabel;
        auto& g = groups_[std::move(label)];
        g.pooled = merge(g.pooled, v);
        ++g.docs;
    }

    void merge_from(const SeriesBuilder& other) {
        for (const auto& [label, g] : other.groups_) {
            auto& mine = groups_[label];
            mine.pooled = merge(mine.pooled, g.pooled);
            mine.docs += g.docs;
        }
    }

    const std::map<std::string, Group, LabelLess>& groups() const noexcept { return groups_; }
    bool empty() const noexcept { return groups_.empty(); }

    std::vector<SeriesBin> bins(std::uint64_t threshold, const Lexicon& lex) const {
        std::vector<SeriesBin> out;
        out.reserve(groups_.size());
        for (const auto& [label, g] : groups_) out.push_back(make_bin(label, g.pooled, g.docs, threshold, lex));
        return out;
    }

    /// A bin is valid when it has at least max(threshold, 1) lexicon words.
    static SeriesBin make_bin(std::string label, FrequencyVector pooled, std::size_t docs,
                              std::uint64_t threshold, const Lexicon& lex) {
        SeriesBin b;
        b.key = std::move(label);
        b.anew_words = pooled.total_anew();
        b.docs = docs;
        b.valid = b.anew_words >= std::max<std::uint64_t>(threshold, 1);
        if (b.valid) b.score = score(pooled, lex);
        b.pooled = pooled.bound() ? std::move(pooled) : FrequencyVector(lex);
        return b;
    }

private:
    std::map<std::string, Group, LabelLess> groups_;
};

/// Groups documents by label and scores each group on its pooled word
/// counts. One bin per distinct label, in LabelLess order.
inline std::vector<SeriesBin> bin_series(std::span<const DocumentRecord> docs, const KeyFn& key_fn,
                                         std::uint64_t threshold, const Lexicon& lex, std::size_t jobs = 1) {
    std::vector<FrequencyVector> vectors(docs.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) { vectors[i] = vectorize(docs[i], lex); });
    SeriesBuilder builder;
    for (std::size_t i = 0; i < docs.size(); ++i) builder.add(key_fn(docs[i].meta), vectors[i]);
    return builder.bins(threshold, lex);
}

/// Greedy age bins: scan ages upward, closing a bin as soon as it holds at
/// least `min_anew` lexicon words. A trailing remainder below the floor is
/// folded into the previous bin. Bins cover the observed age range without
/// gaps: each bin ends one year before the next begins.
inline std::vector<SeriesBin> adaptive_age_bins(const std::map<long, SeriesBuilder::Group>& by_age,
                                                std::uint64_t min_anew, const Lexicon& lex) {
    if (min_anew == 0) throw ArgumentError("min_anew must be positive");
    struct Pending {
        long lo, last;
        FrequencyVector pooled;
        std::size_t docs = 0;
    };
    std::vector<Pending> closed;
    std::optional<Pending> open;
    for (const auto& [age, g] : by_age) {
        if (!open) open = Pending{age, age, FrequencyVector(lex), 0};
        open->last = age;
        open->pooled = merge(open->pooled, g.pooled);
        open->docs += g.docs;
        if (open->pooled.total_anew() >= min_anew) {
            closed.push_back(std::move(*open));
            open.reset();
        }
    }
    if (open) {
        if (closed.empty()) {
            auto b = SeriesBuilder::make_bin(std::to_string(open->lo) + "-" + std::to_string(open->last),
                                             std::move(open->pooled), open->docs, min_anew, lex);
            b.ages = AgeRange{open->lo, open->last};
            return {std::move(b)};
        }
        auto& prev = closed.back();
        prev.last = open->last;
        prev.pooled = merge(prev.pooled, open->pooled);
        prev.docs += open->docs;
    }

    std::vector<SeriesBin> out;
    for (std::size_t i = 0; i < closed.size(); ++i) {
        const long hi = i + 1 < closed.size() ? closed[i + 1].lo - 1 : closed[i].last;
        const long lo = closed[i].lo;
        auto label = lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
        auto b = SeriesBuilder::make_bin(std::move(label), std::move(closed[i].pooled), closed[i].docs, min_anew, lex);
        b.ages = AgeRange{lo, hi};
        out.push_back(std::move(b));
    }
    return out;
}

/// Documents without a non-negative integer `age` are ignored.
inline std::vector<SeriesBin> adaptive_age_bins(std::span<const DocumentRecord> docs, std::uint64_t min_anew,
                                                const Lexicon& lex) {
    std::map<long, SeriesBuilder::Group> by_age;
    for (const auto& d : docs) {
        const auto age = detail::parse_double(d.get("age"));
        if (!age || *age < 0 || *age != std::floor(*age)) continue;
        auto& g = by_age[static_cast<long>(*age)];
        g.pooled = merge(g.pooled, vectorize(d, lex));
        ++g.docs;
    }
    if (by_age.empty()) throw ArgumentError("no documents carry an integer age");
    return adaptive_age_bins(by_age, min_anew, lex);
}

struct RelativePoint {
    std::string key;
    double value = 0.0;  // bin score minus v_avg
    std::uint64_t anew_words = 0;
};

struct RelativeSeries {
    double v_avg = 0.0;
    std::vector<RelativePoint> points;
};

/// Centers valid bin scores on their unweighted mean; invalid bins dropped.
inline RelativeSeries relative_series(std::span<const SeriesBin> bins) {
    RelativeSeries r;
    std::size_t n = 0;
    for (const auto& b : bins) {
        if (!b.valid) continue;
        r.v_avg += b.score->value;
        ++n;
    }
    if (n == 0) throw UnscorableError("series has no valid bins");
    r.v_avg /= static_cast<double>(n);
    for (const auto& b : bins)
        if (b.valid) r.points.push_back({b.key, b.score->value - r.v_avg, b.anew_words});
    return r;
}

struct RankedGroup {
    std::size_t rank = 0;  // 1 = highest score among qualifying groups
    std::string key;
    double score = 0.0;
    std::size_t docs = 0;
    std::uint64_t anew_words = 0;
};

struct GroupRanking {
    std::size_t qualifying = 0;
    std::vector<RankedGroup> top;     // ranks 1..k
    std::vector<RankedGroup> bottom;  // last k ranks, still in descending score order
};

/// Ranks valid groups with at least `min_docs` documents and `min_anew`
/// lexicon words by score, descending, ties alphabetical.
inline GroupRanking rank_groups(std::span<const SeriesBin> bins, std::size_t min_docs, std::uint64_t min_anew,
                                std::size_t top_k) {
    std::vector<RankedGroup> all;
    for (const auto& b : bins) {
        if (!b.valid || b.docs < min_docs || b.anew_words < min_anew) continue;
        all.push_back({0, b.key, b.score->value, b.docs, b.anew_words});
    }
    std::sort(all.begin(), all.end(), [](const RankedGroup& x, const RankedGroup& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.key < y.key;
    });
    for (std::size_t i = 0; i < all.size(); ++i) all[i].rank = i + 1;

    GroupRanking r;
    r.qualifying = all.size();
    const std::size_t k = std::min(top_k, all.size());
    r.top.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    r.bottom.assign(all.end() - static_cast<std::ptrdiff_t>(k), all.end());
    return r;
}

struct WordShare {
    std::string word;
    std::uint64_t count = 0;
    double pct = 0.0;  // 100 * count / total_anew
};

/// Most frequent lexicon words, descending by count, ties alphabetical.
inline std::vector<WordShare> top_words(const FrequencyVector& v, std::size_t k) {
    if (v.total_anew() == 0) throw UnscorableError("no lexicon words to rank");
    std::vector<WordShare> all;
    all.reserve(v.distinct());
    for (const auto& e : v.entries())
        all.push_back({v.word(e), e.count, 100.0 * static_cast<double>(e.count) / static_cast<double>(v.total_anew())});
    std::sort(all.begin(), all.end(), [](const WordShare& x, const WordShare& y) {
        if (x.count != y.count) return x.count > y.count;
        return x.word < y.word;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

/// `key,score,anew_words,valid`; score empty for invalid bins.
inline void write_series_csv(std::ostream& out, std::span<const SeriesBin> bins) {
    out << "key,score,anew_words,valid\n";
    char buf[32];
    for (const auto& b : bins) {
        out << detail::csv_field(b.key) << ',';
        if (b.valid) {
            std::snprintf(buf, sizeof buf, "%.6f", b.score->value);
            out << buf;
        }
        out << ',' << b.anew_words << ',' << (b.valid ? "true" : "false") << '\n';
    }
}

/// `# v_avg=...` comment line, then `key,relative_score,anew_words`.
inline void write_relative_csv(std::ostream& out, const RelativeSeries& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", r.v_avg);
    out << "# v_avg=" << buf << '\n' << "key,relative_score,anew_words\n";
    for (const auto& p : r.points) {
        std::snprintf(buf, sizeof buf, "%.6f", p.value);
        out << detail::csv_field(p.key) << ',' << buf << ',' << p.anew_words << '\n';
    }
}

}  // namespace hedono
