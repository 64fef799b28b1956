#pragma once

#include <cstdint>
#include <span>

#include "hedono/error.hpp"
#include "hedono/lexicon.hpp"
#include "hedono/tokenize.hpp"

namespace hedono {

struct ValenceScore {
    double value = 0.0;
    std::uint64_t anew_words = 0;
    std::size_t distinct_anew = 0;
};

struct GroupScore {
    ValenceScore score;
    double variance = 0.0;  // population variance over lexicon-word tokens
};

namespace detail {

inline void require_lexicon(const FrequencyVector& v, const Lexicon& lex) {
    if (v.bound() && !(v.lexicon() == lex))
        throw ArgumentError("frequency vector was built against a different lexicon");
}

}  // namespace detail

/// Weighted average valence: sum(v_i * f_i) / sum(f_i) over lexicon words.
/// Terms are accumulated in ascending word order, so results are
/// bit-reproducible.
inline ValenceScore score(const FrequencyVector& v, const Lexicon& lex) {
    detail::require_lexicon(v, lex);
    if (v.total_anew() == 0) throw UnscorableError("text contains no lexicon words");
    double weighted = 0.0;
    for (const auto& e : v.entries())
        weighted += lex.entry(e.index).valence * static_cast<double>(e.count);
    return {weighted / static_cast<double>(v.total_anew()), v.total_anew(), v.distinct()};
}

/// Pooled score of a group plus the variance of valence across every
/// lexicon-word token in the group.
inline GroupScore score_group(std::span<const FrequencyVector> vectors, const Lexicon& lex) {
    FrequencyVector pooled(lex);
    for (const auto& v : vectors) {
        detail::require_lexicon(v, lex);
        pooled = merge(pooled, v);
    }
    if (pooled.total_anew() == 0) throw UnscorableError("group contains no lexicon words");
    GroupScore g{score(pooled, lex), 0.0};
    double ss = 0.0;
    for (const auto& e : pooled.entries()) {
        const double d = lex.entry(e.index).valence - g.score.value;
        ss += d * d * static_cast<double>(e.count);
    }
    g.variance = ss / static_cast<double>(pooled.total_anew());
    return g;
}

}  // namespace hedono
