#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ris::detail {

// Minimal UTF-8 helpers. Invalid sequences decode to U+FFFD one byte at a
// time so that every input is processed without throwing.

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
    char32_t cp;
    std::size_t length;
};

inline Decoded decode_one(std::string_view s, std::size_t i) noexcept
{
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        return {b0, 1};
    }
    auto cont = [&](std::size_t k) -> int {
        if (i + k >= s.size()) {
            return -1;
        }
        const auto b = static_cast<unsigned char>(s[i + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if ((b0 & 0xE0) == 0xC0) {
        const int c1 = cont(1);
        if (c1 < 0 || b0 < 0xC2) {
            return {kReplacement, 1};
        }
        return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
    }
    if ((b0 & 0xF0) == 0xE0) {
        const int c1 = cont(1);
        const int c2 = cont(2);
        if (c1 < 0 || c2 < 0) {
            return {kReplacement, 1};
        }
        const char32_t cp = ((b0 & 0x0F) << 12) | (c1 << 6) | c2;
        if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return {kReplacement, 1};
        }
        return {cp, 3};
    }
    if ((b0 & 0xF8) == 0xF0) {
        const int c1 = cont(1);
        const int c2 = cont(2);
        const int c3 = cont(3);
        if (c1 < 0 || c2 < 0 || c3 < 0) {
            return {kReplacement, 1};
        }
        const char32_t cp = ((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3;
        if (cp < 0x10000 || cp > 0x10FFFF) {
            return {kReplacement, 1};
        }
        return {cp, 4};
    }
    return {kReplacement, 1};
}

inline void append_utf8(std::string& out, char32_t cp)
{
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

template <typename Fn>
void for_each_codepoint(std::string_view s, Fn&& fn)
{
    for (std::size_t i = 0; i < s.size();) {
        const auto d = decode_one(s, i);
        fn(d.cp);
        i += d.length;
    }
}

inline std::size_t codepoint_count(std::string_view s) noexcept
{
    std::size_t n = 0;
    for (const char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

constexpr bool is_ascii_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr bool is_ascii_alnum(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

constexpr char ascii_lower(char c) noexcept
{
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + ('a' - 'A')) : c;
}

constexpr bool is_digit(char32_t cp) noexcept { return cp >= U'0' && cp <= U'9'; }

// Alphabetic scripts covered: Latin (incl. Latin-1 and Extended A/B), Greek,
// Cyrillic and everything from Armenian upwards except punctuation/symbol
// blocks that show up in running text.
constexpr bool is_letter(char32_t cp) noexcept
{
    if (cp < 0x80) {
        return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
    }
    if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) {
        return true;
    }
    if (cp >= 0xC0 && cp <= 0x24F) {
        return cp != 0xD7 && cp != 0xF7;
    }
    if (cp >= 0x370 && cp <= 0x3FF) {
        return cp != 0x375 && cp != 0x37E && cp != 0x384 && cp != 0x385 && cp != 0x387;
    }
    if (cp >= 0x400 && cp <= 0x4FF) {
        return !(cp >= 0x482 && cp <= 0x489);
    }
    if (cp >= 0x1E00 && cp <= 0x1EFF) {
        return true;
    }
    if (cp >= 0x2000 && cp <= 0x2BFF) {
        return false;  // punctuation, symbols, arrows, math
    }
    if (cp >= 0x3000 && cp <= 0x303F) {
        return false;  // CJK punctuation
    }
    if (cp >= 0xFE30 && cp <= 0xFE6F) {
        return false;
    }
    if (cp >= 0xFF00 && cp <= 0xFF20) {
        return false;
    }
    if (cp == kReplacement || (cp >= 0xE000 && cp <= 0xF8FF)) {
        return false;
    }
    if (cp >= 0x300 && cp <= 0x36F) {
        return false;  // combining marks are handled by compose()
    }
    return cp >= 0x500;
}

constexpr char32_t to_lower(char32_t cp) noexcept
{
    if (cp < 0x80) {
        return (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
    }
    if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    if (cp >= 0x100 && cp <= 0x17F) {
        // Latin Extended-A pairs; the block switches parity at U+0138.
        if (cp == 0x130) {
            return U'i';
        }
        if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
            return (cp % 2 == 1) ? cp + 1 : cp;
        }
        if (cp == 0x178) {
            return 0xFF;
        }
        if (cp < 0x138 || (cp >= 0x14A && cp <= 0x177)) {
            return (cp % 2 == 0) ? cp + 1 : cp;
        }
        return cp;
    }
    if (cp == 0x1E9E) {
        return 0xDF;  // capital sharp s
    }
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (cp >= 0x410 && cp <= 0x42F) {
        return cp + 0x20;
    }
    if (cp >= 0x400 && cp <= 0x40F) {
        return cp + 0x50;
    }
    return cp;
}

// Composes a base letter with a following combining mark for the Latin
// letters that appear in German and common Western European names.
inline char32_t compose(char32_t base, char32_t mark) noexcept
{
    struct Entry {
        char32_t base;
        char32_t mark;
        char32_t composed;
    };
    static constexpr Entry table[] = {
        {U'a', 0x308, 0xE4}, {U'o', 0x308, 0xF6}, {U'u', 0x308, 0xFC}, {U'e', 0x308, 0xEB},
        {U'i', 0x308, 0xEF}, {U'A', 0x308, 0xC4}, {U'O', 0x308, 0xD6}, {U'U', 0x308, 0xDC},
        {U'a', 0x301, 0xE1}, {U'e', 0x301, 0xE9}, {U'i', 0x301, 0xED}, {U'o', 0x301, 0xF3},
        {U'u', 0x301, 0xFA}, {U'E', 0x301, 0xC9}, {U'a', 0x300, 0xE0}, {U'e', 0x300, 0xE8},
        {U'a', 0x302, 0xE2}, {U'e', 0x302, 0xEA}, {U'o', 0x302, 0xF4}, {U'n', 0x303, 0xF1},
        {U'c', 0x327, 0xE7}, {U'a', 0x30A, 0xE5},
    };
    for (const auto& e : table) {
        if (e.base == base && e.mark == mark) {
            return e.composed;
        }
    }
    return 0;
}

inline std::string lower_utf8(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for_each_codepoint(s, [&](char32_t cp) { append_utf8(out, to_lower(cp)); });
    return out;
}

// Collapses runs of ASCII whitespace into single spaces and trims both ends.
inline std::string collapse_whitespace(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (const char c : s) {
        if (is_ascii_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) {
            out.push_back(' ');
            pending = false;
        }
        out.push_back(c);
    }
    return out;
}

inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && is_ascii_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_ascii_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::uint64_t fnv1a64(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ris::detail
