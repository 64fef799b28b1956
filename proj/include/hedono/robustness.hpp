#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hedono/error.hpp"
#include "hedono/lexicon.hpp"
#include "hedono/parallel.hpp"
#include "hedono/random.hpp"
#include "hedono/series.hpp"

namespace hedono {

struct BoxStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::vector<double> outliers;  // ascending
};

/// Linear interpolation between order statistics: for sorted x[0..n-1],
/// quantile(p) = x[k] + f (x[k+1] - x[k]) with k + f = (n - 1) p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto k = static_cast<std::size_t>(std::floor(h));
    if (k + 1 >= sorted.size()) return sorted.back();
    return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

/// Quartiles by linear interpolation; whiskers at the most extreme data
/// points within 1.5 IQR of the box; everything beyond is an outlier.
inline BoxStats box_stats(std::span<const double> values) {
    if (values.empty()) throw ArgumentError("box statistics need at least one value");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    BoxStats b;
    b.q1 = quantile_sorted(v, 0.25);
    b.median = quantile_sorted(v, 0.5);
    b.q3 = quantile_sorted(v, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_lo = *std::find_if(v.begin(), v.end(), [&](double x) { return x >= lo_fence; });
    b.whisker_hi = *std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= hi_fence; });
    for (double x : v)
        if (x < lo_fence || x > hi_fence) b.outliers.push_back(x);
    return b;
}

struct BootstrapOptions {
    std::size_t subset_size = 750;
    std::size_t num_subsets = 1000;
    std::uint64_t seed = 0;
    std::uint64_t threshold = 0;
    std::size_t jobs = 1;
};

struct BinSpread {
    std::string key;
    double full_relative = 0.0;  // relative value under the full lexicon
    std::size_t samples = 0;     // subsets in which this bin was valid
    std::optional<BoxStats> stats;
};

struct RobustnessRun {
    std::size_t subset_size = 0;
    std::size_t num_subsets = 0;
    std::uint64_t seed = 0;
    double full_v_avg = 0.0;
    std::vector<BinSpread> per_bin;           // valid bins of the full-lexicon run
    std::vector<double> v_avg_distribution;   // one per kept subset, in subset order
    std::size_t dropped = 0;                  // subsets with no valid bin
    // relative[s][j]: bin j's relative valence in subset s (nullopt if invalid or dropped)
    std::vector<std::vector<std::optional<double>>> relative;
};

namespace detail {

// Score of `pooled` restricted to the words flagged in `member`. Sums in
// ascending word order, so it equals score(restrict_to(pooled, sub), sub)
// bit for bit.
inline std::optional<double> restricted_score(const FrequencyVector& pooled, const Lexicon& lex,
                                              const std::vector<char>& member, std::uint64_t threshold,
                                              std::uint64_t* anew_out = nullptr) {
    double weighted = 0.0;
    std::uint64_t total = 0;
    for (const auto& e : pooled.entries()) {
        if (!member[e.index]) continue;
        weighted += lex.entry(e.index).valence * static_cast<double>(e.count);
        total += e.count;
    }
    if (anew_out) *anew_out = total;
    if (total < std::max<std::uint64_t>(threshold, 1)) return std::nullopt;
    return weighted / static_cast<double>(total);
}

}  // namespace detail

/// Recomputes the series under `num_subsets` random m-word sub-lexica.
///
/// `bins` are the full-lexicon bins (with pooled counts) of the series.
/// Subset s draws its words with random::make_stream(seed, s), so the run
/// is identical for every job count. Each subset's series is centered on
/// its own v_avg; subsets leaving no valid bin are counted in `dropped`.
inline RobustnessRun bootstrap_series(std::span<const SeriesBin> bins, const Lexicon& lex,
                                      const BootstrapOptions& opt) {
    if (opt.subset_size == 0 || opt.subset_size > lex.size())
        throw ArgumentError("subset size must be in [1, " + std::to_string(lex.size()) + "]");
    if (opt.num_subsets == 0) throw ArgumentError("number of subsets must be positive");

    RobustnessRun run;
    run.subset_size = opt.subset_size;
    run.num_subsets = opt.num_subsets;
    run.seed = opt.seed;

    std::vector<SeriesBin> full;
    for (const auto& b : bins)
        full.push_back(SeriesBuilder::make_bin(b.key, b.pooled, b.docs, opt.threshold, lex));
    const RelativeSeries full_rel = relative_series(full);
    run.full_v_avg = full_rel.v_avg;

    std::vector<std::size_t> tracked;  // indices into `full` of valid bins
    for (std::size_t j = 0; j < full.size(); ++j)
        if (full[j].valid) tracked.push_back(j);

    run.relative.assign(opt.num_subsets, std::vector<std::optional<double>>(tracked.size()));
    std::vector<std::optional<double>> v_avgs(opt.num_subsets);

    parallel_for(opt.num_subsets, opt.jobs, [&](std::size_t s) {
        auto rng = random::make_stream(opt.seed, s);
        const Lexicon sub = subsample(lex, opt.subset_size, rng);
        std::vector<char> member(lex.size(), 0);
        for (const auto& e : sub.entries()) member[*lex.index_of_folded(e.word)] = 1;

        std::vector<std::optional<double>> scores(full.size());
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t j = 0; j < full.size(); ++j) {
            scores[j] = detail::restricted_score(full[j].pooled, lex, member, opt.threshold);
            if (scores[j]) sum += *scores[j], ++n;
        }
        if (n == 0) return;
        const double v_avg = sum / static_cast<double>(n);
        v_avgs[s] = v_avg;
        for (std::size_t t = 0; t < tracked.size(); ++t)
            if (const auto& sc = scores[tracked[t]]) run.relative[s][t] = *sc - v_avg;
    });

    for (const auto& v : v_avgs) {
        if (v) run.v_avg_distribution.push_back(*v);
        else ++run.dropped;
    }
    for (std::size_t t = 0; t < tracked.size(); ++t) {
        BinSpread spread;
        spread.key = full[tracked[t]].key;
        spread.full_relative = full_rel.points[t].value;
        std::vector<double> values;
        for (std::size_t s = 0; s < opt.num_subsets; ++s)
            if (run.relative[s][t]) values.push_back(*run.relative[s][t]);
        spread.samples = values.size();
        if (!values.empty()) spread.stats = box_stats(values);
        run.per_bin.push_back(std::move(spread));
    }
    return run;
}

inline RobustnessRun bootstrap_series(std::span<const DocumentRecord> docs, const KeyFn& key_fn,
                                      const Lexicon& lex, const BootstrapOptions& opt) {
    const auto bins = bin_series(docs, key_fn, opt.threshold, lex, opt.jobs);
    return bootstrap_series(bins, lex, opt);
}

struct TrendCheck {
    int full_sign = 0;          // sign(last - first) under the full lexicon
    std::size_t evaluated = 0;  // subsets where both end bins were valid
    std::size_t agreeing = 0;
    double agreement() const {
        return evaluated ? static_cast<double>(agreeing) / static_cast<double>(evaluated) : 0.0;
    }
};

/// Does the first-to-last change keep its sign across subsets?
inline TrendCheck trend_agreement(const RobustnessRun& run) {
    TrendCheck t;
    if (run.per_bin.size() < 2) return t;
    const std::size_t last = run.per_bin.size() - 1;
    const double full = run.per_bin[last].full_relative - run.per_bin[0].full_relative;
    t.full_sign = (full > 0) - (full < 0);
    for (const auto& row : run.relative) {
        if (!row[0] || !row[last]) continue;
        ++t.evaluated;
        const double d = *row[last] - *row[0];
        if (((d > 0) - (d < 0)) == t.full_sign) ++t.agreeing;
    }
    return t;
}

/// `key,q1,median,q3,whisker_lo,whisker_hi,n_outliers`, one row per bin.
inline void write_bootstrap_csv(std::ostream& out, const RobustnessRun& run) {
    out << "key,q1,median,q3,whisker_lo,whisker_hi,n_outliers\n";
    char buf[160];
    for (const auto& b : run.per_bin) {
        out << detail::csv_field(b.key);
        if (b.stats) {
            const auto& s = *b.stats;
            std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%.6f,%zu", s.q1, s.median, s.q3, s.whisker_lo,
                          s.whisker_hi, s.outliers.size());
            out << buf << '\n';
        } else {
            out << ",,,,,,0\n";
        }
    }
}

/// `bin_lo,bin_hi,count` over `bins` equal-width bins spanning the data.
inline void write_histogram_csv(std::ostream& out, std::span<const double> values, std::size_t bins = 20) {
    out << "bin_lo,bin_hi,count\n";
    if (values.empty()) return;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn, hi = *mx;
    if (lo == hi) bins = 1;
    std::vector<std::size_t> counts(bins, 0);
    const double width = lo == hi ? 0.0 : (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        std::size_t i = width > 0 ? static_cast<std::size_t>((v - lo) / width) : 0;
        ++counts[std::min(i, bins - 1)];
    }
    char buf[96];
    for (std::size_t i = 0; i < bins; ++i) {
        const double a = lo + width * static_cast<double>(i);
        const double b = i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1);
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%zu\n", a, b, counts[i]);
        out << buf;
    }
}

}  // namespace hedono
