#pragma once

// Valence shift word graphs: ranked horizontal bar charts of per-word
// contributions, as plain text or SVG. Output is a pure function of the
// ShiftResult, so identical inputs render identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "hedono/error.hpp"
#include "hedono/shift.hpp"

namespace hedono {

enum class GraphFormat { Text, Svg };

struct GraphOptions {
    std::size_t top_k = 50;
    bool include_zero = false;  // zero contributions are hidden by default
    int bar_width = 24;         // text: characters per side
};

namespace detail {

template <class... Args>
std::string printf_string(const char* fmt, Args... args) {
    const int n = std::snprintf(nullptr, 0, fmt, args...);
    std::string s(static_cast<std::size_t>(n), '\0');
    std::snprintf(s.data(), s.size() + 1, fmt, args...);
    return s;
}

inline std::vector<const WordContribution*> graph_rows(const ShiftResult& r, const GraphOptions& opt) {
    if (opt.top_k == 0) throw ArgumentError("top_k must be positive");
    std::vector<const WordContribution*> rows;
    for (const auto& c : r.contributions) {
        if (rows.size() == opt.top_k) break;
        if (c.delta_pct == 0.0 && !opt.include_zero) continue;
        rows.push_back(&c);
    }
    return rows;
}

inline double max_magnitude(const std::vector<const WordContribution*>& rows) {
    double m = 0.0;
    for (auto* c : rows) m = std::max(m, std::abs(c->delta_pct));
    return m;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Text label: '+' and ASCII upper case for words above the reference
// average, '-' and lower case below it; '^' / 'v' for more / less frequent
// in the comparison text.
inline std::string text_label(const WordContribution& c) {
    std::string w = c.word;
    if (c.valence_rel > 0)
        std::transform(w.begin(), w.end(), w.begin(),
                       [](char ch) { return (ch >= 'a' && ch <= 'z') ? static_cast<char>(ch - 32) : ch; });
    const char mark = c.valence_rel > 0 ? '+' : c.valence_rel < 0 ? '-' : ' ';
    const char trend = c.abundance_rel > 0 ? '^' : c.abundance_rel < 0 ? 'v' : '=';
    return std::string(1, mark) + w + ' ' + trend;
}

}  // namespace detail

inline std::string render_shift_text(const ShiftResult& r, const GraphOptions& opt = {}) {
    const auto rows = detail::graph_rows(r, opt);
    const double peak = detail::max_magnitude(rows);

    std::size_t label_width = 4;
    for (auto* c : rows) label_width = std::max(label_width, detail::text_label(*c).size());

    std::string out;
    out += "valence shift of b relative to a\n";
    out += detail::printf_string("v_a = %.4f  v_b = %.4f  delta = %+.4f\n", r.v_a, r.v_b, r.delta);
    if (r.zero_delta)
        out += "zero-delta: texts have equal average valence; values are raw (p_b - p_a)(v_i - v_a)\n";
    out += detail::printf_string("%4s  %-*s  %*s|%-*s  %s\n", "rank", static_cast<int>(label_width), "word",
                                 opt.bar_width, "", opt.bar_width, "", r.zero_delta ? "raw" : "percent");

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& c = *rows[i];
        int len = 0;
        if (peak > 0.0 && c.delta_pct != 0.0)
            len = std::max(1, static_cast<int>(std::lround(opt.bar_width * std::abs(c.delta_pct) / peak)));
        const std::string bar(static_cast<std::size_t>(len), '#');
        const std::string left = c.delta_pct < 0 ? bar : "";
        const std::string right = c.delta_pct > 0 ? bar : "";
        const std::string value = r.zero_delta ? detail::printf_string("%+.6g", c.delta_pct)
                                               : detail::printf_string("%+8.2f%%", c.delta_pct);
        out += detail::printf_string("%4zu  %-*s  %*s|%-*s  %s\n", i + 1, static_cast<int>(label_width),
                                     detail::text_label(c).c_str(), opt.bar_width, left.c_str(), opt.bar_width,
                                     right.c_str(), value.c_str());
    }
    if (r.zero_delta)
        out += detail::printf_string("sum of raw contributions: %+.6g\n", r.contribution_sum());
    else
        out += detail::printf_string("sum of contributions: %+.2f%%\n", r.contribution_sum());
    return out;
}

/// SVG bar chart. Words above the reference average are red italic, words
/// below it blue upright; bars extend left for negative contributions.
inline std::string render_shift_svg(const ShiftResult& r, const GraphOptions& opt = {}) {
    const auto rows = detail::graph_rows(r, opt);
    const double peak = detail::max_magnitude(rows);

    constexpr int width = 720, row_h = 18, top = 56, half = 220, label_gap = 6;
    constexpr int axis_x = width / 2;
    const int height = top + static_cast<int>(rows.size()) * row_h + 32;

    std::string out;
    out += detail::printf_string(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        width, height, width, height);
    out += "<title>Valence shift word graph</title>\n";
    out += detail::printf_string("<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"#ffffff\"/>\n", width,
                                 height);
    out += detail::printf_string(
        "<text x=\"%d\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">v_a = %.4f, v_b = %.4f, delta = "
        "%+.4f</text>\n",
        axis_x, r.v_a, r.v_b, r.delta);
    if (r.zero_delta)
        out += detail::printf_string(
            "<text x=\"%d\" y=\"38\" text-anchor=\"middle\">zero-delta: raw contributions</text>\n", axis_x);
    out += detail::printf_string("<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#000000\"/>\n", axis_x,
                                 top - 4, axis_x, top + static_cast<int>(rows.size()) * row_h + 4);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& c = *rows[i];
        const int y = top + static_cast<int>(i) * row_h;
        const double len = peak > 0.0 ? half * std::abs(c.delta_pct) / peak : 0.0;
        const double x = c.delta_pct < 0 ? axis_x - len : axis_x;
        const bool high = c.valence_rel > 0;
        const char* color = high ? "#c0392b" : c.valence_rel < 0 ? "#2b5c9e" : "#808080";
        out += detail::printf_string(
            "<rect x=\"%.2f\" y=\"%d\" width=\"%.2f\" height=\"%d\" fill=\"%s\" fill-opacity=\"0.35\"/>\n", x,
            y + 2, len, row_h - 4, color);

        const std::string arrow = c.abundance_rel > 0 ? "&#8593;" : c.abundance_rel < 0 ? "&#8595;" : "";
        const bool label_right = c.delta_pct < 0;
        const int lx = label_right ? axis_x + label_gap : axis_x - label_gap;
        out += detail::printf_string(
            "<text x=\"%d\" y=\"%d\" text-anchor=\"%s\" fill=\"%s\"%s>%zu. %s%s</text>\n", lx, y + row_h - 5,
            label_right ? "start" : "end", color, high ? " font-style=\"italic\"" : "", i + 1,
            detail::xml_escape(c.word).c_str(), arrow.c_str());
        const std::string value = r.zero_delta ? detail::printf_string("%+.4g", c.delta_pct)
                                               : detail::printf_string("%+.2f%%", c.delta_pct);
        const double vx = c.delta_pct < 0 ? x - label_gap : x + len + label_gap;
        out += detail::printf_string("<text x=\"%.2f\" y=\"%d\" text-anchor=\"%s\" fill=\"#333333\">%s</text>\n",
                                     vx, y + row_h - 5, c.delta_pct < 0 ? "end" : "start", value.c_str());
    }
    const int footer_y = top + static_cast<int>(rows.size()) * row_h + 22;
    const std::string sum = r.zero_delta ? detail::printf_string("%+.6g", r.contribution_sum())
                                         : detail::printf_string("%+.2f%%", r.contribution_sum());
    out += detail::printf_string("<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">sum of contributions: %s</text>\n",
                                 axis_x, footer_y, sum.c_str());
    out += "</svg>\n";
    return out;
}

inline std::string render_shift_graph(const ShiftResult& r, std::size_t top_k, GraphFormat format) {
    GraphOptions opt;
    opt.top_k = top_k;
    return format == GraphFormat::Svg ? render_shift_svg(r, opt) : render_shift_text(r, opt);
}

}  // namespace hedono
