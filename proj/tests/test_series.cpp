#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "hedono/series.hpp"
#include "oracle.hpp"

using namespace hedono;

namespace {

const oracle::WordValence kPangramLex{{"dog", 7.57}, {"lazy", 4.38}, {"quick", 6.64}};
const std::string kPangram = "The quick brown fox jumps over the lazy dog.";

DocumentRecord doc(std::string text, Meta meta) { return {std::move(text), std::move(meta)}; }

// Document holding `n` copies of one lexicon word.
DocumentRecord repeated(const std::string& word, std::size_t n, Meta meta) {
    std::string text;
    for (std::size_t i = 0; i < n; ++i) text += word + " ";
    return doc(std::move(text), std::move(meta));
}

// Bin carrying a preset valid score, for series-level operations.
SeriesBin scored_bin(std::string key, double value, std::uint64_t anew = 1000, std::size_t docs = 100) {
    SeriesBin b;
    b.key = std::move(key);
    b.valid = true;
    b.anew_words = anew;
    b.docs = docs;
    b.score = ValenceScore{value, anew, 1};
    return b;
}

}  // namespace

TEST(BinSeries, TwoPangramsSameYear) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{doc(kPangram, {{"year", "1980"}}), doc(kPangram, {{"year", "1980"}})};
    const auto bins = bin_series(docs, keys::year(), 0, lex);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].key, "1980");
    EXPECT_EQ(bins[0].anew_words, 6u);
    EXPECT_EQ(bins[0].docs, 2u);
    ASSERT_TRUE(bins[0].valid);
    EXPECT_NEAR(bins[0].score->value, 6.1967, 5e-5);
}

TEST(BinSeries, ThresholdBoundary) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{repeated("dog", 999, {{"year", "1961"}}), repeated("dog", 1000, {{"year", "1962"}})};
    const auto bins = bin_series(docs, keys::year(), 1000, lex);
    ASSERT_EQ(bins.size(), 2u);
    EXPECT_EQ(bins[0].anew_words, 999u);
    EXPECT_FALSE(bins[0].valid);
    EXPECT_FALSE(bins[0].score);
    EXPECT_TRUE(bins[1].valid);
    EXPECT_DOUBLE_EQ(bins[1].score->value, 7.57);
}

TEST(BinSeries, ZeroThresholdStillNeedsOneWord) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{doc("nothing here", {{"year", "2000"}})};
    const auto bins = bin_series(docs, keys::year(), 0, lex);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_FALSE(bins[0].valid);
}

TEST(BinSeries, PooledEqualsConcatenatedText) {
    std::mt19937_64 rng(300);
    const auto wv = oracle::random_lexicon(rng, 50);
    const auto lex = oracle::to_lexicon(wv);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<DocumentRecord> docs;
        std::string all;
        for (int k = 0; k < 1 + trial % 7; ++k) {
            auto text = oracle::random_document(rng, wv, 40);
            all += text + " ";
            docs.push_back(doc(std::move(text), {{"genre", "rock"}}));
        }
        const auto bins = bin_series(docs, keys::field("genre"), 0, lex);
        ASSERT_EQ(bins.size(), 1u);
        const auto naive = oracle::score(all, wv);
        if (naive.anew == 0) continue;
        EXPECT_EQ(bins[0].score->value, naive.value);
        EXPECT_TRUE(bins[0].pooled == count_text(all, lex));
    }
}

TEST(BinSeries, PoolingIsNotMeanOfDocumentMeans) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{doc("dog", {{"g", "x"}}), doc("lazy lazy lazy", {{"g", "x"}})};
    const auto bins = bin_series(docs, keys::field("g"), 0, lex);
    EXPECT_DOUBLE_EQ(bins[0].score->value, (7.57 + 3 * 4.38) / 4);
}

TEST(BinSeries, MissingLabelGoesToUnknownLast) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{doc("dog", {}), doc("dog", {{"year", "1999"}}), doc("lazy", {{"year", "1970"}})};
    const auto bins = bin_series(docs, keys::year(), 0, lex);
    ASSERT_EQ(bins.size(), 3u);
    EXPECT_EQ(bins[0].key, "1970");
    EXPECT_EQ(bins[1].key, "1999");
    EXPECT_EQ(bins[2].key, "unknown");
}

TEST(BinSeries, ThresholdMonotonicity) {
    std::mt19937_64 rng(301);
    const auto wv = oracle::random_lexicon(rng, 30);
    const auto lex = oracle::to_lexicon(wv);
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 200; ++i)
        docs.push_back(doc(oracle::random_document(rng, wv, 10 + i), {{"year", std::to_string(1960 + i % 23)}}));
    std::vector<bool> prev;
    for (std::uint64_t t : {0, 10, 50, 100, 200, 400, 800, 1600}) {
        const auto bins = bin_series(docs, keys::year(), t, lex);
        for (std::size_t i = 0; i < prev.size(); ++i)
            if (!prev[i]) { EXPECT_FALSE(bins[i].valid); }
        prev.clear();
        for (const auto& b : bins) prev.push_back(b.valid);
    }
}

TEST(BinSeries, ParallelMatchesSerialAndBuilderMergeOrder) {
    std::mt19937_64 rng(302);
    const auto wv = oracle::random_lexicon(rng, 40);
    const auto lex = oracle::to_lexicon(wv);
    std::vector<DocumentRecord> docs;
    for (int i = 0; i < 300; ++i)
        docs.push_back(doc(oracle::random_document(rng, wv, 30), {{"year", std::to_string(1990 + i % 11)}}));
    const auto serial = bin_series(docs, keys::year(), 20, lex, 1);
    const auto parallel = bin_series(docs, keys::year(), 20, lex, 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].key, parallel[i].key);
        EXPECT_TRUE(serial[i].pooled == parallel[i].pooled);
        EXPECT_EQ(serial[i].score.has_value(), parallel[i].score.has_value());
        if (serial[i].score) { EXPECT_EQ(serial[i].score->value, parallel[i].score->value); }
    }

    // Two builders over a split of the data, merged in both orders.
    SeriesBuilder left, right;
    for (std::size_t i = 0; i < docs.size(); ++i)
        (i % 3 ? left : right).add(keys::year()(docs[i].meta), vectorize(docs[i], lex));
    SeriesBuilder lr = left, rl = right;
    lr.merge_from(right);
    rl.merge_from(left);
    const auto a = lr.bins(20, lex), b = rl.bins(20, lex);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_TRUE(a[i].pooled == serial[i].pooled);
        EXPECT_TRUE(b[i].pooled == serial[i].pooled);
    }
}

TEST(Keys, WeekdayFullWeekGivesSevenOrderedBins) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    std::vector<DocumentRecord> docs;
    // 2024-01-01 is a Monday.
    for (int d = 1; d <= 14; ++d) {
        char date[16];
        std::snprintf(date, sizeof date, "2024-01-%02d", d);
        docs.push_back(doc(kPangram, {{"date", date}}));
    }
    const auto bins = bin_series(docs, keys::weekday(), 0, lex);
    ASSERT_EQ(bins.size(), 7u);
    const char* expect[] = {"1-Mon", "2-Tue", "3-Wed", "4-Thu", "5-Fri", "6-Sat", "7-Sun"};
    for (int i = 0; i < 7; ++i) {
        EXPECT_EQ(bins[i].key, expect[i]);
        EXPECT_EQ(bins[i].docs, 2u);
    }
}

TEST(Keys, WeekdayUsesStatedTimezone) {
    const auto key = keys::weekday();
    // Monday 23:30 UTC is already Tuesday at +02:00.
    EXPECT_EQ(key({{"date", "2024-01-01T23:30:00Z"}}), "1-Mon");
    EXPECT_EQ(key({{"date", "2024-01-01T23:30:00Z"}, {"timezone", "+02:00"}}), "2-Tue");
    // Offset written in the timestamp is honoured when no timezone is given.
    EXPECT_EQ(key({{"date", "2024-01-02T00:30:00+01:00"}}), "2-Tue");
    EXPECT_EQ(key({{"date", "2024-01-02T00:30:00+01:00"}, {"timezone", "Z"}}), "1-Mon");
    EXPECT_EQ(key({{"date", "not a date"}}), "");
}

TEST(Keys, DateDerivedLabels) {
    const Meta m{{"date", "1987-06-15"}};
    EXPECT_EQ(keys::year()(m), "1987");
    EXPECT_EQ(keys::month()(m), "1987-06");
    EXPECT_EQ(keys::day()(m), "1987-06-15");
    EXPECT_EQ(keys::year()({{"year", "2001"}, {"date", "1987-06-15"}}), "2001");
}

TEST(Keys, NumericRanges) {
    const auto key = keys::numeric_range("latitude", 10);
    EXPECT_EQ(key({{"latitude", "42.3"}}), "40..50");
    EXPECT_EQ(key({{"latitude", "-3"}}), "-10..0");
    EXPECT_EQ(key({{"latitude", "40"}}), "40..50");
    EXPECT_EQ(key({{"latitude", "abc"}}), "");
    EXPECT_THROW(keys::numeric_range("x", 0), ArgumentError);
}

TEST(LabelOrder, NumbersThenNaturalThenUnknown) {
    std::vector<std::string> labels{"unknown", "10..20", "-10..0", "0..10", "2-Tue", "1-Mon", "rock", "pop",
                                    "track10",  "track9", "1999",   "2000"};
    std::sort(labels.begin(), labels.end(), LabelLess{});
    EXPECT_EQ(labels, (std::vector<std::string>{"-10..0", "0..10", "1-Mon", "2-Tue", "10..20", "1999", "2000",
                                                "pop", "rock", "track9", "track10", "unknown"}));
}

TEST(AdaptiveAge, ExactFitGivesOneBinPerAge) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    std::vector<DocumentRecord> docs;
    for (int age = 20; age < 25; ++age) docs.push_back(repeated("dog", 100, {{"age", std::to_string(age)}}));
    const auto bins = adaptive_age_bins(docs, 100, lex);
    ASSERT_EQ(bins.size(), 5u);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(bins[i].key, std::to_string(20 + i));
        EXPECT_EQ(bins[i].anew_words, 100u);
        EXPECT_TRUE(bins[i].valid);
    }
}

TEST(AdaptiveAge, HalfFloorGivesWidthTwo) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    std::vector<DocumentRecord> docs;
    for (int age = 10; age < 18; ++age) docs.push_back(repeated("lazy", 50, {{"age", std::to_string(age)}}));
    const auto bins = adaptive_age_bins(docs, 100, lex);
    ASSERT_EQ(bins.size(), 4u);
    EXPECT_EQ(bins[0].key, "10-11");
    EXPECT_EQ(bins[3].key, "16-17");
    for (const auto& b : bins) {
        EXPECT_EQ(b.ages->hi - b.ages->lo, 1);
        EXPECT_EQ(b.anew_words, 100u);
    }
}

TEST(AdaptiveAge, SingleAgeGivesSingleBin) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{repeated("dog", 30, {{"age", "33"}}), repeated("lazy", 40, {{"age", "33"}})};
    const auto bins = adaptive_age_bins(docs, 50, lex);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0].key, "33");
    EXPECT_EQ(bins[0].anew_words, 70u);
    EXPECT_TRUE(bins[0].valid);
}

TEST(AdaptiveAge, TooFewWordsGivesSingleInvalidBin) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{repeated("dog", 10, {{"age", "20"}}), repeated("dog", 10, {{"age", "30"}})};
    const auto bins = adaptive_age_bins(docs, 1000, lex);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_FALSE(bins[0].valid);
    EXPECT_EQ(bins[0].key, "20-30");
}

TEST(AdaptiveAge, TrailingRemainderFoldsIntoPredecessor) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{repeated("dog", 100, {{"age", "20"}}), repeated("dog", 100, {{"age", "21"}}),
                           repeated("dog", 30, {{"age", "22"}})};
    const auto bins = adaptive_age_bins(docs, 100, lex);
    ASSERT_EQ(bins.size(), 2u);
    EXPECT_EQ(bins[1].key, "21-22");
    EXPECT_EQ(bins[1].anew_words, 130u);
}

TEST(AdaptiveAge, RandomDataPartitionsAgeRange) {
    std::mt19937_64 rng(303);
    const auto lex = oracle::to_lexicon(kPangramLex);
    std::uniform_int_distribution<int> age(13, 80), n(1, 60);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<DocumentRecord> docs;
        long lo = 1000, hi = -1;
        std::uint64_t total = 0;
        for (int i = 0; i < 200; ++i) {
            const int a = age(rng), k = n(rng);
            lo = std::min<long>(lo, a), hi = std::max<long>(hi, a);
            total += k;
            docs.push_back(repeated(i % 2 ? "dog" : "quick", k, {{"age", std::to_string(a)}}));
        }
        docs.push_back(doc("dog", {{"age", "unknown"}}));
        const std::uint64_t floor = 200 + trial * 50;
        const auto bins = adaptive_age_bins(docs, floor, lex);
        ASSERT_FALSE(bins.empty());
        EXPECT_EQ(bins.front().ages->lo, lo);
        EXPECT_EQ(bins.back().ages->hi, hi);
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            EXPECT_GE(bins[i].anew_words, floor);
            EXPECT_TRUE(bins[i].valid);
            EXPECT_LE(bins[i].ages->lo, bins[i].ages->hi);
            if (i > 0) { EXPECT_EQ(bins[i].ages->lo, bins[i - 1].ages->hi + 1); }
            sum += bins[i].anew_words;
        }
        EXPECT_EQ(sum, total);
    }
}

TEST(AdaptiveAge, RejectsBadInput) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{doc("dog", {{"age", "20"}})};
    EXPECT_THROW(adaptive_age_bins(docs, 0, lex), ArgumentError);
    const std::vector no_age{doc("dog", {{"age", "20.5"}})};
    EXPECT_THROW(adaptive_age_bins(no_age, 10, lex), ArgumentError);
}

TEST(Relative, TwoBins) {
    const std::vector bins{scored_bin("1970", 6.4), scored_bin("2000", 6.1)};
    const auto r = relative_series(bins);
    EXPECT_NEAR(r.v_avg, 6.25, 1e-12);
    ASSERT_EQ(r.points.size(), 2u);
    EXPECT_NEAR(r.points[0].value, 0.15, 1e-12);
    EXPECT_NEAR(r.points[1].value, -0.15, 1e-12);
}

TEST(Relative, ConstantSeriesIsZero) {
    const std::vector bins{scored_bin("a", 5.5), scored_bin("b", 5.5), scored_bin("c", 5.5)};
    for (const auto& p : relative_series(bins).points) EXPECT_EQ(p.value, 0.0);
}

TEST(Relative, InvalidBinsDroppedAndNoneIsError) {
    SeriesBin invalid;
    invalid.key = "x";
    const std::vector bins{scored_bin("a", 6.0), invalid, scored_bin("b", 7.0)};
    const auto r = relative_series(bins);
    EXPECT_EQ(r.points.size(), 2u);
    EXPECT_DOUBLE_EQ(r.v_avg, 6.5);
    const std::vector none{invalid};
    EXPECT_THROW(relative_series(none), UnscorableError);
}

TEST(Relative, SumsToZeroAndTranslationEquivariant) {
    std::mt19937_64 rng(304);
    std::uniform_real_distribution<double> v(1, 9), c(-3, 3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<SeriesBin> bins, shifted;
        const double off = c(rng);
        for (int i = 0; i < 1 + trial % 40; ++i) {
            const double x = v(rng);
            bins.push_back(scored_bin(std::to_string(i), x));
            shifted.push_back(scored_bin(std::to_string(i), x + off));
        }
        const auto r = relative_series(bins), s = relative_series(shifted);
        double sum = 0;
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            sum += r.points[i].value;
            EXPECT_NEAR(r.points[i].value, s.points[i].value, 1e-12);
        }
        EXPECT_NEAR(sum, 0.0, 1e-9);
    }
}

TEST(Rank, OrderMatchesSortOracle) {
    std::mt19937_64 rng(305);
    std::uniform_real_distribution<double> v(3, 8);
    std::vector<SeriesBin> bins;
    std::vector<std::pair<double, std::string>> expect;
    for (int i = 0; i < 40; ++i) {
        const double x = std::round(v(rng) * 100) / 100;
        const std::string key = "artist" + std::to_string(i);
        bins.push_back(scored_bin(key, x));
        expect.emplace_back(-x, key);
    }
    std::sort(expect.begin(), expect.end());
    const auto r = rank_groups(bins, 50, 1000, 5);
    EXPECT_EQ(r.qualifying, 40u);
    ASSERT_EQ(r.top.size(), 5u);
    ASSERT_EQ(r.bottom.size(), 5u);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(r.top[i].key, expect[i].second);
        EXPECT_EQ(r.top[i].rank, std::size_t(i + 1));
        EXPECT_EQ(r.bottom[i].key, expect[35 + i].second);
        EXPECT_EQ(r.bottom[i].rank, std::size_t(36 + i));
    }
}

TEST(Rank, FloorsExcludeGroups) {
    const std::vector bins{scored_bin("a", 7.0, 1000, 49), scored_bin("b", 6.0, 999, 60), scored_bin("c", 5.0, 1000, 50)};
    const auto r = rank_groups(bins, 50, 1000, 3);
    EXPECT_EQ(r.qualifying, 1u);
    ASSERT_EQ(r.top.size(), 1u);
    EXPECT_EQ(r.top[0].key, "c");
}

TEST(Rank, TiesAlphabeticalAndEmptyIsNotError) {
    const std::vector bins{scored_bin("zed", 6.0), scored_bin("amy", 6.0), scored_bin("kim", 6.0)};
    const auto r = rank_groups(bins, 0, 0, 2);
    EXPECT_EQ(r.top[0].key, "amy");
    EXPECT_EQ(r.top[1].key, "kim");
    EXPECT_EQ(r.bottom[1].key, "zed");
    const auto none = rank_groups(bins, 1000, 0, 2);
    EXPECT_EQ(none.qualifying, 0u);
    EXPECT_TRUE(none.top.empty());
    EXPECT_TRUE(none.bottom.empty());
}

TEST(TopWords, PangramTieBreak) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const auto v = count_text(kPangram, lex);
    const auto t = top_words(v, 1);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].word, "dog");
    EXPECT_NEAR(t[0].pct, 33.33, 0.005);
    const auto all = top_words(v, 10);
    EXPECT_EQ(all.size(), 3u);
    double sum = 0;
    for (const auto& w : all) sum += w.pct;
    EXPECT_NEAR(sum, 100.0, 1e-9);
    EXPECT_THROW(top_words(count_text("fox", lex), 1), UnscorableError);
}

TEST(TopWords, DescendingByCount) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const auto t = top_words(count_text("lazy quick lazy dog lazy quick", lex), 3);
    EXPECT_EQ(t[0].word, "lazy");
    EXPECT_EQ(t[0].count, 3u);
    EXPECT_EQ(t[1].word, "quick");
    EXPECT_EQ(t[2].word, "dog");
}

TEST(SeriesCsv, Layout) {
    const auto lex = oracle::to_lexicon(kPangramLex);
    const std::vector docs{doc(kPangram, {{"year", "1980"}}), doc("fox", {{"year", "1981"}})};
    std::ostringstream out;
    write_series_csv(out, bin_series(docs, keys::year(), 1, lex));
    EXPECT_EQ(out.str(), "key,score,anew_words,valid\n1980,6.196667,3,true\n1981,,0,false\n");

    std::ostringstream rel;
    const std::vector bins{scored_bin("1970", 6.4), scored_bin("2000", 6.1)};
    write_relative_csv(rel, relative_series(bins));
    EXPECT_EQ(rel.str(), "# v_avg=6.250000\nkey,relative_score,anew_words\n1970,0.150000,1000\n2000,-0.150000,1000\n");
}
