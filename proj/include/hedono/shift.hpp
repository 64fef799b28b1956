#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hedono/error.hpp"
#include "hedono/lexicon.hpp"
#include "hedono/score.hpp"
#include "hedono/tokenize.hpp"

namespace hedono {

enum class Quadrant { PosUp, PosDown, NegUp, NegDown, Zero };

inline constexpr std::string_view to_string(Quadrant q) noexcept {
    switch (q) {
        case Quadrant::PosUp: return "pos-up";
        case Quadrant::PosDown: return "pos-down";
        case Quadrant::NegUp: return "neg-up";
        case Quadrant::NegDown: return "neg-down";
        case Quadrant::Zero: break;
    }
    return "zero";
}

struct WordContribution {
    std::string word;
    double delta_pct = 0.0;  // raw (p_b - p_a)(v_i - v_a) when ShiftResult::zero_delta
    int valence_rel = 0;     // sign(v_i - v_a)
    int abundance_rel = 0;   // sign(p_b - p_a)
    Quadrant quadrant = Quadrant::Zero;
    double valence = 0.0;
    double p_a = 0.0;
    double p_b = 0.0;
};

struct ShiftResult {
    double delta = 0.0;
    double v_a = 0.0;
    double v_b = 0.0;
    bool zero_delta = false;
    // Descending |delta_pct|, ties alphabetical. Zero contributions included.
    std::vector<WordContribution> contributions;

    double contribution_sum() const {
        double s = 0.0;
        for (const auto& c : contributions) s += c.delta_pct;
        return s;
    }
};

// |v_b - v_a| at or below this is treated as no difference at all.
inline constexpr double kZeroDeltaTolerance = 1e-12;

namespace detail {

inline constexpr int sign(double x) noexcept { return (x > 0) - (x < 0); }

inline Quadrant classify(int valence_rel, int abundance_rel) noexcept {
    if (valence_rel == 0 || abundance_rel == 0) return Quadrant::Zero;
    if (valence_rel > 0) return abundance_rel > 0 ? Quadrant::PosUp : Quadrant::PosDown;
    return abundance_rel > 0 ? Quadrant::NegUp : Quadrant::NegDown;
}

}  // namespace detail

/// Describes text `b` relative to reference text `a`.
///
/// delta = v_b - v_a. Each word in either text contributes
///     100 * (p_b - p_a) * (v_i - v_a) / |delta|
/// percent, where p is the word's share of lexicon-word tokens. Because
/// sum_i (p_b - p_a)(v_i - v_a) = delta, the contributions sum to +100 when
/// b scores higher than a and -100 when it scores lower. Words that pull b
/// below a carry negative contributions.
///
/// When |delta| <= kZeroDeltaTolerance the division is skipped: `zero_delta`
/// is set and each delta_pct holds the raw product (p_b - p_a)(v_i - v_a).
inline ShiftResult shift(const FrequencyVector& a, const FrequencyVector& b, const Lexicon& lex) {
    const ValenceScore sa = score(a, lex);
    const ValenceScore sb = score(b, lex);

    ShiftResult r;
    r.v_a = sa.value;
    r.v_b = sb.value;
    r.delta = r.v_b - r.v_a;
    r.zero_delta = std::abs(r.delta) <= kZeroDeltaTolerance;
    const double scale = r.zero_delta ? 1.0 : 100.0 / std::abs(r.delta);
    const double na = static_cast<double>(a.total_anew());
    const double nb = static_cast<double>(b.total_anew());

    auto add = [&](std::uint32_t index, std::uint64_t ca, std::uint64_t cb) {
        const auto& entry = lex.entry(index);
        WordContribution c;
        c.word = entry.word;
        c.valence = entry.valence;
        c.p_a = static_cast<double>(ca) / na;
        c.p_b = static_cast<double>(cb) / nb;
        const double dp = c.p_b - c.p_a;
        const double dv = c.valence - r.v_a;
        c.valence_rel = detail::sign(dv);
        c.abundance_rel = detail::sign(dp);
        c.quadrant = detail::classify(c.valence_rel, c.abundance_rel);
        c.delta_pct = c.quadrant == Quadrant::Zero ? 0.0 : dp * dv * scale;
        r.contributions.push_back(std::move(c));
    };

    const auto ea = a.entries(), eb = b.entries();
    std::size_t i = 0, j = 0;
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && ea[i].index < eb[j].index)) {
            add(ea[i].index, ea[i].count, 0);
            ++i;
        } else if (i == ea.size() || eb[j].index < ea[i].index) {
            add(eb[j].index, 0, eb[j].count);
            ++j;
        } else {
            add(ea[i].index, ea[i].count, eb[j].count);
            ++i, ++j;
        }
    }

    std::stable_sort(r.contributions.begin(), r.contributions.end(),
                     [](const WordContribution& x, const WordContribution& y) {
                         const double ax = std::abs(x.delta_pct), ay = std::abs(y.delta_pct);
                         if (ax != ay) return ax > ay;
                         return x.word < y.word;
                     });
    return r;
}

/// CSV with header `word,delta_pct,valence_rel,abundance_rel,quadrant`,
/// rows in ranking order, numbers in shortest round-trip form.
inline void write_shift_csv(std::ostream& out, const ShiftResult& r) {
    out << "word,delta_pct,valence_rel,abundance_rel,quadrant\n";
    for (const auto& c : r.contributions) {
        out << detail::csv_field(c.word) << ',' << detail::format_double(c.delta_pct) << ',' << c.valence_rel << ','
            << c.abundance_rel << ',' << to_string(c.quadrant) << '\n';
    }
}

}  // namespace hedono
