#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hedono/error.hpp"
#include "hedono/lexicon.hpp"
#include "hedono/unicode.hpp"

namespace hedono {

/// Calls `sink(std::string_view)` for every token of `text`, in order.
///
/// A token is a maximal run of letters and apostrophes with leading and
/// trailing apostrophes removed; it is case-folded and typographic
/// apostrophes are normalized to '\''. Digits, hyphens and all other
/// punctuation separate tokens. The view passed to `sink` is only valid for
/// the duration of the call. Returns the number of invalid UTF-8 sequences
/// encountered (each is treated as U+FFFD, a separator).
template <class Sink>
std::size_t for_each_token(std::string_view text, Sink&& sink) {
    std::string tok;
    std::size_t pending_apostrophes = 0;
    std::size_t invalid = 0;

    auto flush = [&] {
        if (!tok.empty()) sink(std::string_view(tok));
        tok.clear();
        pending_apostrophes = 0;
    };
    auto letter = [&] {
        if (pending_apostrophes) {
            tok.append(pending_apostrophes, '\'');
            pending_apostrophes = 0;
        }
    };

    for (std::size_t i = 0; i < text.size();) {
        const auto b = static_cast<unsigned char>(text[i]);
        if (b < 0x80) {
            ++i;
            if (b >= 'a' && b <= 'z') {
                letter();
                tok.push_back(static_cast<char>(b));
            } else if (b >= 'A' && b <= 'Z') {
                letter();
                tok.push_back(static_cast<char>(b + 32));
            } else if (b == '\'') {
                if (!tok.empty()) ++pending_apostrophes;
            } else {
                flush();
            }
            continue;
        }
        const auto d = unicode::decode(text, i);
        i += d.length;
        if (!d.valid) {
            ++invalid;
            flush();
        } else if (unicode::is_apostrophe(d.cp)) {
            if (!tok.empty()) ++pending_apostrophes;
        } else if (unicode::is_alpha(d.cp)) {
            letter();
            unicode::append_utf8(tok, unicode::to_lower(d.cp));
        } else {
            flush();
        }
    }
    flush();
    return invalid;
}

inline std::vector<std::string> tokenize(std::string_view text, std::size_t* invalid_utf8 = nullptr) {
    std::vector<std::string> out;
    const auto bad = for_each_token(text, [&](std::string_view t) { out.emplace_back(t); });
    if (invalid_utf8) *invalid_utf8 += bad;
    return out;
}

/// Counts of lexicon words observed in a text or corpus slice.
///
/// Counts are stored sparsely as (lexicon index, count) pairs in ascending
/// index order, which is ascending word order. A default-constructed vector
/// is not bound to any lexicon and acts as the identity for merge().
class FrequencyVector {
public:
    struct Entry {
        std::uint32_t index;
        std::uint64_t count;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    FrequencyVector() = default;
    explicit FrequencyVector(const Lexicon& lex) : lex_(lex) {}

    /// Builds a vector from (word, count) pairs; words must be in `lex`.
    static FrequencyVector from_word_counts(
        const Lexicon& lex, std::span<const std::pair<std::string, std::uint64_t>> counts,
        std::uint64_t non_lexicon_words = 0) {
        std::vector<std::uint64_t> dense(lex.size(), 0);
        for (const auto& [w, c] : counts) {
            const auto idx = lex.index_of(w);
            if (!idx) throw ArgumentError("'" + w + "' is not a lexicon word");
            dense[*idx] += c;
        }
        FrequencyVector v(lex);
        for (std::uint32_t i = 0; i < dense.size(); ++i) {
            if (dense[i]) {
                v.entries_.push_back({i, dense[i]});
                v.total_anew_ += dense[i];
            }
        }
        v.total_words_ = v.total_anew_ + non_lexicon_words;
        return v;
    }

    bool bound() const noexcept { return lex_.has_value(); }
    const Lexicon& lexicon() const {
        if (!lex_) throw ArgumentError("frequency vector is not bound to a lexicon");
        return *lex_;
    }

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::uint64_t total_anew() const noexcept { return total_anew_; }
    std::uint64_t total_words() const noexcept { return total_words_; }
    std::size_t distinct() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return total_words_ == 0; }

    std::uint64_t count(std::string_view word) const {
        if (!lex_) return 0;
        const auto idx = lex_->index_of(word);
        if (!idx) return 0;
        const auto it = std::lower_bound(entries_.begin(), entries_.end(), *idx,
                                         [](const Entry& e, std::uint32_t i) { return e.index < i; });
        return (it != entries_.end() && it->index == *idx) ? it->count : 0;
    }

    const std::string& word(const Entry& e) const { return lexicon().entry(e.index).word; }
    double valence(const Entry& e) const { return lexicon().entry(e.index).valence; }

    friend bool operator==(const FrequencyVector& a, const FrequencyVector& b) {
        if (a.bound() != b.bound()) return a.empty() && b.empty();
        return (!a.bound() || a.lexicon() == b.lexicon()) && a.entries_ == b.entries_ &&
               a.total_anew_ == b.total_anew_ && a.total_words_ == b.total_words_;
    }

private:
    friend class Counter;
    friend FrequencyVector merge(const FrequencyVector&, const FrequencyVector&);
    friend FrequencyVector restrict_to(const FrequencyVector&, const Lexicon&);

    std::optional<Lexicon> lex_;
    std::vector<Entry> entries_;
    std::uint64_t total_anew_ = 0;
    std::uint64_t total_words_ = 0;
};

/// Streaming accumulator: feed tokens or raw text, then take the vector.
///
/// Uses a dense scratch array the size of the lexicon plus a list of
/// touched slots, so finishing a short document costs O(distinct hits).
/// Not thread-safe; use one Counter per thread.
class Counter {
public:
    explicit Counter(const Lexicon& lex) : lex_(lex), dense_(lex.size(), 0) {}

    void add_token(std::string_view folded) {
        ++total_words_;
        const auto idx = lex_.index_of_folded(folded);
        if (!idx) return;
        if (dense_[*idx]++ == 0) touched_.push_back(*idx);
    }

    /// Tokenizes and counts `text`; returns the number of invalid UTF-8 sequences.
    std::size_t add_text(std::string_view text) {
        return for_each_token(text, [this](std::string_view t) { add_token(t); });
    }

    FrequencyVector finish() {
        FrequencyVector v(lex_);
        std::sort(touched_.begin(), touched_.end());
        v.entries_.reserve(touched_.size());
        for (auto i : touched_) {
            v.entries_.push_back({i, dense_[i]});
            v.total_anew_ += dense_[i];
            dense_[i] = 0;
        }
        v.total_words_ = total_words_;
        touched_.clear();
        total_words_ = 0;
        return v;
    }

private:
    Lexicon lex_;
    std::vector<std::uint64_t> dense_;
    std::vector<std::uint32_t> touched_;
    std::uint64_t total_words_ = 0;
};

/// Counts already-normalized tokens (the output of tokenize()).
inline FrequencyVector count(std::span<const std::string> tokens, const Lexicon& lex) {
    Counter c(lex);
    for (const auto& t : tokens) c.add_token(t);
    return c.finish();
}

inline FrequencyVector count_text(std::string_view text, const Lexicon& lex,
                                  std::size_t* invalid_utf8 = nullptr) {
    Counter c(lex);
    const auto bad = c.add_text(text);
    if (invalid_utf8) *invalid_utf8 += bad;
    return c.finish();
}

/// Pointwise sum. Commutative and associative; an unbound vector is the
/// identity. Throws ArgumentError when both sides are bound to different
/// lexica.
inline FrequencyVector merge(const FrequencyVector& a, const FrequencyVector& b) {
    if (!b.bound()) {
        FrequencyVector r = a;
        r.total_words_ += b.total_words_;
        return r;
    }
    if (!a.bound()) return merge(b, a);
    if (!(a.lexicon() == b.lexicon()))
        throw ArgumentError("cannot merge frequency vectors built against different lexica");

    FrequencyVector r(a.lexicon());
    r.entries_.reserve(std::max(a.entries_.size(), b.entries_.size()));
    auto ia = a.entries_.begin(), ib = b.entries_.begin();
    while (ia != a.entries_.end() || ib != b.entries_.end()) {
        if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->index < ib->index)) {
            r.entries_.push_back(*ia++);
        } else if (ia == a.entries_.end() || ib->index < ia->index) {
            r.entries_.push_back(*ib++);
        } else {
            r.entries_.push_back({ia->index, ia->count + ib->count});
            ++ia, ++ib;
        }
    }
    r.total_anew_ = a.total_anew_ + b.total_anew_;
    r.total_words_ = a.total_words_ + b.total_words_;
    return r;
}

/// Fraction of lexicon-word tokens that are `word`: count / total_anew.
inline double relative_abundance(const FrequencyVector& v, std::string_view word) {
    if (v.total_anew() == 0)
        throw UnscorableError("relative abundance is undefined: no lexicon words counted");
    return static_cast<double>(v.count(word)) / static_cast<double>(v.total_anew());
}

/// Re-expresses `v` against `sub`, a lexicon whose words are a subset of
/// v's lexicon. Equivalent to recounting the original tokens against
/// `sub`: counts of dropped words move out of total_anew, total_words is
/// unchanged.
inline FrequencyVector restrict_to(const FrequencyVector& v, const Lexicon& sub) {
    FrequencyVector r(sub);
    r.total_words_ = v.total_words_;
    for (const auto& e : v.entries_) {
        const auto idx = sub.index_of_folded(v.word(e));
        if (!idx) continue;
        if (sub.entry(*idx).valence != v.valence(e))
            throw ArgumentError("sub-lexicon disagrees on the valence of '" + v.word(e) + "'");
        r.entries_.push_back({*idx, e.count});
        r.total_anew_ += e.count;
    }
    return r;
}

}  // namespace hedono
