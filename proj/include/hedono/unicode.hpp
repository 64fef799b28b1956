#pragma once

// Minimal UTF-8 and case-folding helpers.
//
// Case folding is "simple lowercase" for the scripts that matter for
// English-language lexica and their loanwords: ASCII, Latin-1, Latin
// Extended-A/B, Greek and Cyrillic. Code points outside those ranges are
// returned unchanged. The tables are fixed in code so results never depend
// on the process locale.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace hedono::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
    char32_t cp;
    std::size_t length;  // bytes consumed, always >= 1
    bool valid;
};

// Decodes one code point at `pos`. Invalid or truncated sequences consume a
// single byte and yield U+FFFD.
inline Decoded decode(std::string_view s, std::size_t pos) noexcept {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1, true};

    std::size_t need;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
        need = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        need = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        need = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
        return {kReplacement, 1, false};
    }
    if (pos + need >= s.size()) return {kReplacement, 1, false};
    for (std::size_t i = 1; i <= need; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return {kReplacement, 1, false};
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return {kReplacement, 1, false};
    return {cp, need + 1, true};
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline constexpr char32_t to_lower(char32_t c) noexcept {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    // Latin-1
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    // Latin Extended-A: alternating upper/lower pairs
    if (c == 0x130) return U'i';
    if (c >= 0x100 && c <= 0x137) return c | 1;
    if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
    if (c >= 0x14A && c <= 0x177) return c | 1;
    if (c == 0x178) return 0xFF;
    if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
    // Latin Extended-B subsets with regular pairing
    if (c >= 0x1CD && c <= 0x1DC) return (c & 1) ? c + 1 : c;
    if (c >= 0x1DE && c <= 0x1EF) return c | 1;
    if (c >= 0x1F8 && c <= 0x21F) return c | 1;
    // Greek
    if (c == 0x386) return 0x3AC;
    if (c >= 0x388 && c <= 0x38A) return c + 37;
    if (c == 0x38C) return 0x3CC;
    if (c == 0x38E || c == 0x38F) return c + 63;
    if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
    // Cyrillic
    if (c >= 0x400 && c <= 0x40F) return c + 80;
    if (c >= 0x410 && c <= 0x42F) return c + 32;
    if (c >= 0x460 && c <= 0x481) return c | 1;
    if (c >= 0x48A && c <= 0x4BF) return c | 1;
    if (c >= 0x4D0 && c <= 0x52F) return c | 1;
    return c;
}

// Letters for tokenization purposes. ASCII and Latin ranges are exact;
// beyond Latin, whole letter-bearing blocks are accepted and the
// punctuation/symbol/emoji blocks are rejected.
inline constexpr bool is_alpha(char32_t c) noexcept {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
    if (c <= 0x24F) return c != 0xD7 && c != 0xF7;
    if (c <= 0x2AF) return true;                     // IPA extensions
    if (c >= 0x300 && c <= 0x36F) return true;       // combining marks continue a word
    if (c >= 0x370 && c <= 0x3FF) return c != 0x37E && c != 0x387;
    if (c >= 0x400 && c <= 0x52F) return c < 0x482 || c > 0x489;
    if (c >= 0x530 && c <= 0x1FFF) return true;
    if (c >= 0x2C00 && c <= 0x2DFF) return true;
    if (c >= 0x3040 && c <= 0x9FFF) return true;
    if (c >= 0xAC00 && c <= 0xD7AF) return true;
    if (c >= 0xF900 && c <= 0xFAFF) return true;
    return false;
}

// ASCII apostrophe plus the typographic right single quote and the
// modifier-letter apostrophe, all normalized to '\''.
inline constexpr bool is_apostrophe(char32_t c) noexcept {
    return c == U'\'' || c == 0x2019 || c == 0x02BC;
}

// Lowercases a UTF-8 string. Invalid bytes become U+FFFD.
inline std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const auto b = static_cast<unsigned char>(s[i]);
        if (b < 0x80) {
            out.push_back(static_cast<char>((b >= 'A' && b <= 'Z') ? b + 32 : b));
            ++i;
            continue;
        }
        const Decoded d = decode(s, i);
        append_utf8(out, to_lower(d.cp));
        i += d.length;
    }
    return out;
}

}  // namespace hedono::unicode
