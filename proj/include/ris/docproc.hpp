#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ris/corpus_model.hpp"
#include "ris/detail/utf8.hpp"

namespace ris::docproc {

struct Token {
    std::string text;
    std::size_t position = 0;

    bool operator==(Token const&) const = default;
};

struct Bigram {
    std::string first;
    std::string second;

    auto operator<=>(Bigram const&) const = default;

    [[nodiscard]] std::string joined() const { return first + " " + second; }
};

using StopwordSet = std::unordered_set<std::string>;

/// Parses a stopword list: one token per line, `#` starts a comment line.
inline StopwordSet parse_stopwords(std::string_view text)
{
    StopwordSet out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = detail::trim(text.substr(start, end - start));
        if (!line.empty() && line.front() != '#') {
            out.insert(detail::lower_utf8(line));
        }
        start = end + 1;
    }
    return out;
}

struct Stopwords {
    StopwordSet en;
    StopwordSet de;
    StopwordSet any;  // union, used when the language is undetermined

    static Stopwords from_sets(StopwordSet en, StopwordSet de)
    {
        Stopwords s{std::move(en), std::move(de), {}};
        s.any = s.en;
        s.any.insert(s.de.begin(), s.de.end());
        return s;
    }

    static Stopwords load(std::filesystem::path const& dir)
    {
        return from_sets(parse_stopwords(read_file(dir / "stopwords_en.txt")),
                         parse_stopwords(read_file(dir / "stopwords_de.txt")));
    }

    [[nodiscard]] StopwordSet const& for_language(LangCode lang) const noexcept
    {
        switch (lang) {
            case LangCode::en:
                return en;
            case LangCode::de:
                return de;
            case LangCode::und:
                break;
        }
        return any;
    }
};

// ---------------------------------------------------------------------------
// Tokenization

/// Lowercase word tokens. Letters, digits and word-internal single hyphens
/// form tokens; everything else separates. Tokens shorter than two code
/// points are dropped.
inline std::vector<Token> tokenize(std::string_view text)
{
    std::vector<char32_t> cps;
    cps.reserve(text.size());
    detail::for_each_codepoint(text, [&](char32_t cp) {
        if (cp >= 0x300 && cp <= 0x36F && !cps.empty()) {
            if (const char32_t c = detail::compose(cps.back(), cp); c != 0) {
                cps.back() = c;
                return;
            }
        }
        cps.push_back(cp);
    });

    auto alnum = [](char32_t cp) { return detail::is_letter(cp) || detail::is_digit(cp); };

    std::vector<Token> tokens;
    std::string current;
    std::size_t current_len = 0;
    auto flush = [&] {
        if (current_len >= 2) {
            tokens.push_back(Token{current, tokens.size()});
        }
        current.clear();
        current_len = 0;
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t cp = cps[i];
        if (alnum(cp)) {
            detail::append_utf8(current, detail::to_lower(cp));
            ++current_len;
        } else if (cp == U'-' && current_len > 0 && i + 1 < cps.size() && alnum(cps[i + 1]) &&
                   alnum(cps[i - 1])) {
            current.push_back('-');
            ++current_len;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::vector<std::string> token_texts(std::string_view text)
{
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) {
        out.push_back(std::move(t.text));
    }
    return out;
}

inline std::vector<Bigram> bigrams(std::vector<Token> const& tokens, StopwordSet const& stopwords)
{
    std::vector<Bigram> out;
    if (tokens.size() < 2) {
        return out;
    }
    out.reserve(tokens.size() - 1);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        auto const& a = tokens[i].text;
        auto const& b = tokens[i + 1].text;
        if (stopwords.count(a) != 0 || stopwords.count(b) != 0) {
            continue;
        }
        out.push_back(Bigram{a, b});
    }
    return out;
}

inline LangCode detect_language(std::string_view text, Stopwords const& stopwords)
{
    const auto tokens = tokenize(text);
    if (tokens.empty()) {
        return LangCode::und;
    }
    std::size_t en = 0;
    std::size_t de = 0;
    for (auto const& t : tokens) {
        en += stopwords.en.count(t.text);
        de += stopwords.de.count(t.text);
    }
    const double n = static_cast<double>(tokens.size());
    const double score_en = static_cast<double>(en) / n;
    const double score_de = static_cast<double>(de) / n;
    if (std::max(score_en, score_de) >= 0.05 && std::abs(score_en - score_de) > 0.01) {
        return score_en > score_de ? LangCode::en : LangCode::de;
    }
    return LangCode::und;
}

// ---------------------------------------------------------------------------
// Cleaning

namespace detail_refs {

inline bool is_reference_heading(std::string_view line)
{
    std::string s = ::ris::detail::lower_utf8(::ris::detail::trim(line));
    if (!s.empty() && s.back() == ':') {
        s.pop_back();
    }
    return s == "references" || s == "bibliography" || s == "literatur" || s == "literaturverzeichnis";
}

// One pass: cut at the latest heading line that starts in the final 40% of
// the text (measured in code points). Returns the input when nothing applies.
inline std::string strip_once(std::string_view text)
{
    const std::size_t total = ::ris::detail::codepoint_count(text);
    std::size_t offset_cp = 0;
    std::size_t cut = std::string_view::npos;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(start, end - start);
        if (is_reference_heading(line) && offset_cp * 10 >= total * 6) {
            cut = start;
        }
        offset_cp += ::ris::detail::codepoint_count(line) + 1;
        start = end + 1;
    }
    if (cut == std::string_view::npos) {
        return std::string(text);
    }
    auto kept = text.substr(0, cut);
    while (!kept.empty() && ::ris::detail::is_ascii_space(kept.back())) {
        kept.remove_suffix(1);
    }
    return std::string(kept);
}

}  // namespace detail_refs

/// Removes a trailing reference section. A heading only counts when it starts
/// in the final 40% of the text; the cut is reapplied until no heading
/// qualifies, which makes the function idempotent.
inline std::string strip_references(std::string_view text)
{
    std::string current(text);
    for (;;) {
        std::string next = detail_refs::strip_once(current);
        if (next.size() == current.size()) {
            return current;
        }
        current = std::move(next);
    }
}

namespace detail_pii {

constexpr bool is_local_char(char c) noexcept
{
    return ::ris::detail::is_ascii_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

constexpr bool is_domain_char(char c) noexcept
{
    return ::ris::detail::is_ascii_alnum(c) || c == '.' || c == '-';
}

constexpr bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

inline bool starts_with_icase(std::string_view s, std::size_t i, std::string_view prefix) noexcept
{
    if (s.size() - i < prefix.size()) {
        return false;
    }
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (::ris::detail::ascii_lower(s[i + k]) != prefix[k]) {
            return false;
        }
    }
    return true;
}

// URL: `http://`, `https://` or `www.` followed by non-whitespace.
inline std::size_t url_end(std::string_view s, std::size_t i) noexcept
{
    std::size_t j;
    if (starts_with_icase(s, i, "https://")) {
        j = i + 8;
    } else if (starts_with_icase(s, i, "http://")) {
        j = i + 7;
    } else if (starts_with_icase(s, i, "www.")) {
        j = i + 4;
    } else {
        return 0;
    }
    while (j < s.size() && !::ris::detail::is_ascii_space(s[j])) {
        ++j;
    }
    return j;
}

// Email `local@domain.tld`; `local_end` is the index of the `@`. Needs an
// alphabetic TLD of at least two letters; the longest domain wins.
inline std::size_t email_end(std::string_view s, std::size_t local_end) noexcept
{
    // s[local_end] == '@'
    std::size_t m = local_end + 1;
    while (m < s.size() && is_domain_char(s[m])) {
        ++m;
    }
    for (std::size_t d = m; d-- > local_end + 2;) {
        if (s[d] != '.') {
            continue;
        }
        std::size_t e = d + 1;
        while (e < m && is_alpha(s[e])) {
            ++e;
        }
        if (e - d - 1 >= 2) {
            return e;
        }
    }
    return 0;
}

}  // namespace detail_pii

/// Replaces every e-mail address and URL with a space and collapses
/// whitespace. Matching scans left to right; at each position a URL prefix
/// takes precedence over an e-mail address.
inline std::string scrub_pii(std::string_view text)
{
    using namespace detail_pii;
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (const auto u = url_end(text, i); u != 0) {
            out.push_back(' ');
            i = u;
            continue;
        }
        if (is_local_char(text[i])) {
            std::size_t k = i;
            while (k < text.size() && is_local_char(text[k])) {
                ++k;
            }
            if (k < text.size() && text[k] == '@') {
                if (const auto e = email_end(text, k); e != 0) {
                    out.push_back(' ');
                    i = e;
                    continue;
                }
            }
            // Every address starting inside [i, k) would share the same '@'
            // and domain, so only a URL prefix can match before k.
            std::size_t j = i + 1;
            while (j < k && url_end(text, j) == 0) {
                ++j;
            }
            out.append(text.substr(i, j - i));
            i = j;
            continue;
        }
        out.push_back(text[i]);
        ++i;
    }
    return ::ris::detail::collapse_whitespace(out);
}

/// Cleaning applied to extracted publication bodies before indexing.
inline std::string clean_body(std::string_view text) { return scrub_pii(strip_references(text)); }

}  // namespace ris::docproc
