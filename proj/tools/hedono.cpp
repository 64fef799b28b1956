// hedono: command-line front end for corpus valence measurement.
//
// Exit codes: 0 success, 1 usage/configuration/input error, 2 not enough
// lexicon words to score.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hedono/hedono.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInsufficient = 2;
constexpr std::size_t kBatchSize = 2048;

struct CommonOptions {
    std::string lexicon;
    std::string input_format = "auto";
    std::size_t jobs = 1;
};

std::optional<hedono::CorpusFormat> format_from(const std::string& name) {
    if (name == "auto") return std::nullopt;
    auto f = hedono::parse_format(name);
    if (!f) throw hedono::ArgumentError("unknown input format '" + name + "'");
    return f;
}

void report_reader(const hedono::CorpusReader& reader, const std::string& path) {
    for (const auto& w : reader.warnings()) {
        if (w.line)
            std::cerr << "warning: " << path << ":" << w.line << ": " << w.message << " (skipped)\n";
        else
            std::cerr << "warning: " << path << ": " << w.message << " (skipped)\n";
    }
    if (reader.skipped() > reader.warnings().size())
        std::cerr << "warning: " << path << ": " << reader.skipped() << " records skipped in total\n";
}

// Streams a corpus, counting documents in parallel batches. `sink` sees
// each document's metadata and vector in corpus order.
template <class Sink>
std::size_t scan_corpus(const std::string& path, const CommonOptions& opt, const hedono::Lexicon& lex, Sink&& sink) {
    hedono::CorpusReader reader(path, format_from(opt.input_format));
    std::vector<hedono::DocumentRecord> batch;
    std::vector<hedono::FrequencyVector> vectors;
    std::vector<std::size_t> invalid;
    std::size_t invalid_total = 0;
    while (reader.next_batch(batch, kBatchSize)) {
        vectors.assign(batch.size(), {});
        invalid.assign(batch.size(), 0);
        hedono::parallel_for(batch.size(), opt.jobs, [&](std::size_t i) {
            if (const auto* t = batch[i].text())
                vectors[i] = hedono::count_text(*t, lex, &invalid[i]);
            else
                vectors[i] = hedono::vectorize(batch[i], lex);
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            invalid_total += invalid[i];
            sink(batch[i].meta, vectors[i]);
        }
    }
    report_reader(reader, path);
    if (invalid_total)
        std::cerr << "warning: " << path << ": " << invalid_total
                  << " invalid UTF-8 sequences replaced with U+FFFD\n";
    return reader.records();
}

hedono::FrequencyVector pool_corpus(const std::string& path, const CommonOptions& opt, const hedono::Lexicon& lex,
                                    std::size_t* docs = nullptr) {
    hedono::FrequencyVector pooled(lex);
    const auto n = scan_corpus(path, opt, lex, [&](const hedono::Meta&, const hedono::FrequencyVector& v) {
        pooled = hedono::merge(pooled, v);
    });
    if (docs) *docs = n;
    return pooled;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// Output goes to `path` when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw hedono::IoError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw hedono::IoError("cannot write '" + path + "'");
    f << content;
}

// ---------------------------------------------------------------- score

struct ScoreOptions {
    std::string corpus;
    std::size_t top_k = 5;
    std::string format = "text";
};

int cmd_score(const CommonOptions& common, const ScoreOptions& opt, const hedono::Lexicon& lex) {
    std::size_t docs = 0;
    const auto pooled = pool_corpus(opt.corpus, common, lex, &docs);
    if (pooled.total_anew() == 0) {
        std::cerr << "error: corpus contains no lexicon words; cannot score\n";
        return kExitInsufficient;
    }
    const auto group = hedono::score_group(std::span(&pooled, 1), lex);
    const auto top = hedono::top_words(pooled, opt.top_k);
    const double fraction = static_cast<double>(pooled.total_anew()) / static_cast<double>(pooled.total_words());

    auto& out = std::cout;
    if (opt.format == "json") {
        nlohmann::json j;
        j["v_text"] = group.score.value;
        j["variance"] = group.variance;
        j["documents"] = docs;
        j["total_words"] = pooled.total_words();
        j["anew_words"] = pooled.total_anew();
        j["anew_fraction"] = fraction;
        j["distinct_anew"] = group.score.distinct_anew;
        j["top_words"] = nlohmann::json::array();
        for (const auto& w : top) j["top_words"].push_back({{"word", w.word}, {"count", w.count}, {"pct", w.pct}});
        out << j.dump(2) << '\n';
    } else if (opt.format == "csv") {
        out << "v_text,variance,documents,total_words,anew_words,anew_fraction,distinct_anew\n"
            << fixed(group.score.value, 6) << ',' << fixed(group.variance, 6) << ',' << docs << ','
            << pooled.total_words() << ',' << pooled.total_anew() << ',' << fixed(fraction, 6) << ','
            << group.score.distinct_anew << '\n';
    } else {
        out << "v_text         " << fixed(group.score.value, 4) << '\n'
            << "variance       " << fixed(group.variance, 4) << '\n'
            << "documents      " << docs << '\n'
            << "total_words    " << pooled.total_words() << '\n'
            << "anew_words     " << pooled.total_anew() << '\n'
            << "anew_fraction  " << fixed(100.0 * fraction, 2) << "%\n"
            << "distinct_anew  " << group.score.distinct_anew << '\n'
            << "top ANEW words\n";
        for (std::size_t i = 0; i < top.size(); ++i)
            out << "  " << i + 1 << "  " << top[i].word << "  " << fixed(top[i].pct, 2) << "%\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- shift

struct ShiftOptions {
    std::string corpus_a, corpus_b;
    std::size_t top_k = 20;
    std::string svg, csv;
    std::string format = "text";
    bool include_zero = false;
};

int cmd_shift(const CommonOptions& common, const ShiftOptions& opt, const hedono::Lexicon& lex) {
    const auto a = pool_corpus(opt.corpus_a, common, lex);
    const auto b = pool_corpus(opt.corpus_b, common, lex);
    if (a.total_anew() == 0 || b.total_anew() == 0) {
        std::cerr << "error: " << (a.total_anew() == 0 ? opt.corpus_a : opt.corpus_b)
                  << " contains no lexicon words; cannot compare\n";
        return kExitInsufficient;
    }
    const auto r = hedono::shift(a, b, lex);
    hedono::GraphOptions g;
    g.top_k = opt.top_k;
    g.include_zero = opt.include_zero;

    if (opt.format == "csv") {
        hedono::write_shift_csv(std::cout, r);
    } else {
        std::cout << hedono::render_shift_text(r, g);
    }
    if (r.zero_delta) std::cerr << "notice: texts have equal average valence (zero delta); contributions are raw\n";
    if (!opt.csv.empty()) {
        std::ofstream f(opt.csv, std::ios::binary);
        if (!f) throw hedono::IoError("cannot write '" + opt.csv + "'");
        hedono::write_shift_csv(f, r);
    }
    if (!opt.svg.empty()) write_file(opt.svg, hedono::render_shift_svg(r, g));
    return kExitOk;
}

// ---------------------------------------------------------------- series

struct SeriesOptions {
    std::string corpus;
    std::string by = "year";
    double width = 0;
    std::uint64_t threshold = 0;
    bool relative = false;
    bool adaptive_age = false;
    std::uint64_t min_anew = 3000;
    std::size_t rank = 0;
    std::size_t min_docs = 0;
    std::string output;
};

int cmd_series(const CommonOptions& common, const SeriesOptions& opt, const hedono::Lexicon& lex) {
    std::vector<hedono::SeriesBin> bins;
    if (opt.adaptive_age) {
        std::map<long, hedono::SeriesBuilder::Group> by_age;
        scan_corpus(opt.corpus, common, lex, [&](const hedono::Meta& m, const hedono::FrequencyVector& v) {
            const auto it = m.find("age");
            if (it == m.end()) return;
            const auto age = hedono::detail::parse_double(it->second);
            if (!age) return;
            auto& g = by_age[static_cast<long>(*age)];
            g.pooled = hedono::merge(g.pooled, v);
            ++g.docs;
        });
        if (by_age.empty()) {
            std::cerr << "error: no documents carry an integer age\n";
            return kExitInsufficient;
        }
        bins = hedono::adaptive_age_bins(by_age, opt.min_anew, lex);
    } else {
        const auto key = hedono::keys::by_name(opt.by, opt.width);
        hedono::SeriesBuilder builder;
        scan_corpus(opt.corpus, common, lex,
                    [&](const hedono::Meta& m, const hedono::FrequencyVector& v) { builder.add(key(m), v); });
        if (builder.empty()) {
            std::cerr << "error: corpus is empty\n";
            return kExitInsufficient;
        }
        bins = builder.bins(opt.threshold, lex);
    }

    Output out(opt.output);
    if (opt.rank > 0) {
        const auto r = hedono::rank_groups(bins, opt.min_docs, opt.adaptive_age ? 0 : opt.min_anew, opt.rank);
        auto& os = out.stream();
        os << "section,rank,key,score,docs,anew_words\n";
        for (const auto* part : {&r.top, &r.bottom})
            for (const auto& g : *part)
                os << (part == &r.top ? "top" : "bottom") << ',' << g.rank << ',' << hedono::detail::csv_field(g.key)
                   << ',' << fixed(g.score, 6) << ',' << g.docs << ',' << g.anew_words << '\n';
        return kExitOk;
    }
    if (opt.relative) {
        const bool any_valid = std::any_of(bins.begin(), bins.end(), [](const auto& b) { return b.valid; });
        if (!any_valid) {
            std::cerr << "error: no bin reaches the threshold; relative series is undefined\n";
            return kExitInsufficient;
        }
        hedono::write_relative_csv(out.stream(), hedono::relative_series(bins));
    } else {
        hedono::write_series_csv(out.stream(), bins);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- bootstrap

struct BootstrapCliOptions {
    std::string corpus;
    std::string by = "year";
    double width = 0;
    std::uint64_t threshold = 0;
    std::size_t subset_size = 750;
    std::size_t num_subsets = 1000;
    std::uint64_t seed = 1;
    std::string hist;
    std::string output;
    double supermajority = 0.9;
};

int cmd_bootstrap(const CommonOptions& common, const BootstrapCliOptions& opt, const hedono::Lexicon& lex) {
    const auto key = hedono::keys::by_name(opt.by, opt.width);
    hedono::SeriesBuilder builder;
    scan_corpus(opt.corpus, common, lex,
                [&](const hedono::Meta& m, const hedono::FrequencyVector& v) { builder.add(key(m), v); });
    const auto bins = builder.bins(opt.threshold, lex);
    if (std::none_of(bins.begin(), bins.end(), [](const auto& b) { return b.valid; })) {
        std::cerr << "error: no bin reaches the threshold under the full lexicon\n";
        return kExitInsufficient;
    }

    hedono::BootstrapOptions bo;
    bo.subset_size = opt.subset_size;
    bo.num_subsets = opt.num_subsets;
    bo.seed = opt.seed;
    bo.threshold = opt.threshold;
    bo.jobs = common.jobs;
    const auto run = hedono::bootstrap_series(bins, lex, bo);

    Output out(opt.output);
    hedono::write_bootstrap_csv(out.stream(), run);
    if (!opt.hist.empty()) {
        std::ofstream f(opt.hist, std::ios::binary);
        if (!f) throw hedono::IoError("cannot write '" + opt.hist + "'");
        hedono::write_histogram_csv(f, run.v_avg_distribution);
    }
    if (run.dropped) std::cerr << "warning: " << run.dropped << " subsets left no valid bin and were dropped\n";
    const auto trend = hedono::trend_agreement(run);
    if (trend.evaluated) {
        std::cerr << "trend sign agreement: " << fixed(trend.agreement(), 3) << " of " << trend.evaluated
                  << " subsets (" << (trend.agreement() >= opt.supermajority ? "meets" : "below") << " "
                  << fixed(opt.supermajority, 2) << ")\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- prepare

struct PrepareOptions {
    std::string corpus;
    bool segment = false;
    bool feel = false;
    bool dedup = false;
    std::string output;
};

int cmd_prepare(const CommonOptions& common, const PrepareOptions& opt) {
    hedono::CorpusReader reader(opt.corpus, format_from(common.input_format));
    hedono::DayDeduper dedup;
    Output out(opt.output);
    std::size_t kept = 0, seen = 0;
    auto emit = [&](hedono::DocumentRecord doc) {
        ++seen;
        if (opt.feel && !hedono::is_feel_sentence(*doc.text())) return;
        if (opt.dedup && !dedup.keep(doc)) return;
        out.stream() << hedono::to_jsonl(doc) << '\n';
        ++kept;
    };
    while (auto doc = reader.next()) {
        if (!doc->text()) continue;
        if (opt.segment) {
            for (auto& s : hedono::segment_sentences(*doc->text())) emit({std::move(s), doc->meta});
        } else {
            emit(std::move(*doc));
        }
    }
    report_reader(reader, opt.corpus);
    if (dedup.undated()) std::cerr << "warning: " << dedup.undated() << " records had no usable date; not deduplicated\n";
    std::cerr << "kept " << kept << " of " << seen << " records\n";
    return kExitOk;
}

void add_common(CLI::App* sub, CommonOptions& common, bool needs_lexicon) {
    if (needs_lexicon) sub->add_option("-l,--lexicon", common.lexicon, "Lexicon file (word, valence columns)")->required();
    sub->add_option("--input-format", common.input_format, "Corpus format: auto, jsonl, plain-dir, text")
        ->check(CLI::IsMember({"auto", "jsonl", "plain-dir", "dir", "text"}));
    sub->add_option("-j,--jobs", common.jobs, "Worker threads (never changes output)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hedono: lexicon-based valence measurement for large text corpora"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI-style config file; [section] names match subcommands")
        ->envname("HEDONO_CONFIG");
    app.footer(
        "Corpus input: *.jsonl (one object per line, `text` plus metadata), a directory of\n"
        "text files named <key>=<value>__<key>=<value>.txt, or any other file as a single document.\n"
        "Exit codes: 0 success, 1 usage/config/input error, 2 too few lexicon words to score.");

    CommonOptions common;

    ScoreOptions score_opt;
    auto* score = app.add_subcommand("score", "Weighted-average valence of a corpus");
    add_common(score, common, true);
    score->add_option("corpus", score_opt.corpus, "Corpus path")->required();
    score->add_option("-k,--top-k", score_opt.top_k, "Number of most frequent lexicon words to list");
    score->add_option("--format", score_opt.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));

    ShiftOptions shift_opt;
    auto* shift = app.add_subcommand("shift", "Valence shift word graph of corpus B relative to corpus A");
    add_common(shift, common, true);
    shift->add_option("corpus_a", shift_opt.corpus_a, "Reference corpus")->required();
    shift->add_option("corpus_b", shift_opt.corpus_b, "Comparison corpus")->required();
    shift->add_option("-k,--top-k", shift_opt.top_k, "Words shown in the graph")->check(CLI::PositiveNumber);
    shift->add_option("--svg", shift_opt.svg, "Also write the graph as SVG");
    shift->add_option("--csv", shift_opt.csv, "Also write every contribution as CSV");
    shift->add_option("--format", shift_opt.format, "stdout format: text or csv")->check(CLI::IsMember({"text", "csv"}));
    shift->add_flag("--include-zero", shift_opt.include_zero, "Show zero contributions in the graph");

    SeriesOptions series_opt;
    auto* series = app.add_subcommand("series", "Valence per metadata bin as CSV");
    add_common(series, common, true);
    series->add_option("corpus", series_opt.corpus, "Corpus path")->required();
    series->add_option("--by", series_opt.by, "year, month, day, weekday, or any metadata field");
    series->add_option("--width", series_opt.width, "Bin a numeric field into ranges of this width");
    series->add_option("--threshold", series_opt.threshold, "Minimum lexicon words for a valid bin");
    series->add_flag("--relative", series_opt.relative, "Subtract the mean of valid bin scores");
    series->add_flag("--adaptive-age", series_opt.adaptive_age, "Greedy age bins holding >= --min-anew words");
    series->add_option("--min-anew", series_opt.min_anew, "Word floor for --adaptive-age and --rank");
    series->add_option("--rank", series_opt.rank, "Print the top and bottom K groups instead of the series");
    series->add_option("--min-docs", series_opt.min_docs, "Document floor for --rank");
    series->add_option("-o,--output", series_opt.output, "Write CSV here instead of stdout");

    BootstrapCliOptions boot_opt;
    auto* boot = app.add_subcommand("bootstrap", "Series robustness under random lexicon subsets");
    add_common(boot, common, true);
    boot->add_option("corpus", boot_opt.corpus, "Corpus path")->required();
    boot->add_option("--by", boot_opt.by, "Grouping key, as for series");
    boot->add_option("--width", boot_opt.width, "Bin a numeric field into ranges of this width");
    boot->add_option("--threshold", boot_opt.threshold, "Minimum lexicon words for a valid bin");
    boot->add_option("-m,--subset-size", boot_opt.subset_size, "Words per random sub-lexicon")->check(CLI::PositiveNumber);
    boot->add_option("-N,--subsets", boot_opt.num_subsets, "Number of sub-lexica")->check(CLI::PositiveNumber);
    boot->add_option("--seed", boot_opt.seed, "Random seed");
    boot->add_option("--hist", boot_opt.hist, "Write the histogram of per-subset v_avg as CSV");
    boot->add_option("--supermajority", boot_opt.supermajority, "Trend agreement reported as meeting this fraction");
    boot->add_option("-o,--output", boot_opt.output, "Write CSV here instead of stdout");

    PrepareOptions prep_opt;
    auto* prep = app.add_subcommand("prepare", "Filter a corpus into JSONL (sentence split, feel filter, dedup)");
    add_common(prep, common, false);
    prep->add_option("corpus", prep_opt.corpus, "Corpus path")->required();
    prep->add_flag("--segment", prep_opt.segment, "Split each document into sentences first");
    prep->add_flag("--feel-filter", prep_opt.feel, "Keep first-person sentences containing a form of 'feel'");
    prep->add_flag("--dedup", prep_opt.dedup, "Drop repeats of 6+ token sentences within a day");
    prep->add_option("-o,--output", prep_opt.output, "Write JSONL here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (prep->parsed()) return cmd_prepare(common, prep_opt);

        std::optional<hedono::Lexicon> lex;
        try {
            lex = hedono::load_lexicon_file(common.lexicon);
        } catch (const hedono::Error& e) {
            std::cerr << "error: lexicon " << common.lexicon << ": " << e.what() << '\n';
            return kExitUsage;
        }
        if (score->parsed()) return cmd_score(common, score_opt, *lex);
        if (shift->parsed()) return cmd_shift(common, shift_opt, *lex);
        if (series->parsed()) return cmd_series(common, series_opt, *lex);
        if (boot->parsed()) return cmd_bootstrap(common, boot_opt, *lex);
    } catch (const hedono::UnscorableError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInsufficient;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
