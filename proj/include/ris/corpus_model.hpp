#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ris/detail/utf8.hpp"

namespace ris {

using json = nlohmann::json;

class Error : public std::runtime_error {
   public:
    enum class Kind { InvalidInput, Parse, Io, Remote, Internal };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), m_kind(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return m_kind; }

   private:
    Kind m_kind;
};

// Strongly typed identifiers. Both order lexicographically by value so that
// every map keyed by them iterates deterministically.
struct ResearcherId {
    std::string value;
    auto operator<=>(ResearcherId const&) const = default;
};

struct PublicationId {
    std::string value;
    auto operator<=>(PublicationId const&) const = default;
};

/// Roster ids are assigned in roster order: r-0001, r-0002, ...
inline ResearcherId researcher_id_for_index(std::size_t one_based)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "r-%04zu", one_based);
    return ResearcherId{buf};
}

enum class LangCode { en, de, und };

inline std::string_view to_string(LangCode l) noexcept
{
    switch (l) {
        case LangCode::en:
            return "en";
        case LangCode::de:
            return "de";
        case LangCode::und:
            break;
    }
    return "und";
}

inline LangCode lang_from_string(std::string_view s)
{
    if (s == "en") {
        return LangCode::en;
    }
    if (s == "de") {
        return LangCode::de;
    }
    if (s == "und") {
        return LangCode::und;
    }
    throw Error(Error::Kind::Parse, "unknown language code '" + std::string(s) + "'");
}

enum class AreaSource { InstitutionWebsite, ScholarProfile, DocumentClassifier };

inline std::string_view to_string(AreaSource s) noexcept
{
    switch (s) {
        case AreaSource::InstitutionWebsite:
            return "InstitutionWebsite";
        case AreaSource::ScholarProfile:
            return "ScholarProfile";
        case AreaSource::DocumentClassifier:
            break;
    }
    return "DocumentClassifier";
}

inline AreaSource area_source_from_string(std::string_view s)
{
    if (s == "InstitutionWebsite") {
        return AreaSource::InstitutionWebsite;
    }
    if (s == "ScholarProfile") {
        return AreaSource::ScholarProfile;
    }
    if (s == "DocumentClassifier") {
        return AreaSource::DocumentClassifier;
    }
    throw Error(Error::Kind::Parse, "unknown area source '" + std::string(s) + "'");
}

struct AreaAssignment {
    std::string label;
    AreaSource source = AreaSource::DocumentClassifier;
    double confidence = 0.0;

    bool operator==(AreaAssignment const&) const = default;
};

struct ResearcherStub {
    std::string full_name;
    std::string department;
    std::string email;
    std::string phone;
    std::string institution;
    // Areas listed on the institution website (optional roster column).
    std::vector<std::string> website_areas;

    bool operator==(ResearcherStub const&) const = default;
};

struct PublicationRef {
    std::string title;
    std::optional<int> year;

    bool operator==(PublicationRef const&) const = default;
};

struct ScholarProfileRecord {
    std::string display_name;
    std::string affiliation;
    std::string verified_email_domain;
    std::vector<std::string> stated_areas;
    std::map<int, std::int64_t> citation_counts_by_year;
    std::vector<PublicationRef> publication_refs;
    std::vector<std::string> co_authors;
    std::string profile_url;

    bool operator==(ScholarProfileRecord const&) const = default;
};

struct Researcher {
    ResearcherId id;
    ResearcherStub stub;
    std::optional<ScholarProfileRecord> profile;
    std::optional<double> match_score;
    bool needs_review = false;
    std::vector<AreaAssignment> areas;
    std::vector<PublicationId> publication_ids;

    bool operator==(Researcher const&) const = default;
};

struct Publication {
    PublicationId id;
    std::string title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> source_url;
    std::string body_text;
    LangCode language = LangCode::und;
    std::vector<AreaAssignment> area_assignments;
    std::vector<ResearcherId> owners;

    bool operator==(Publication const&) const = default;
};

// ---------------------------------------------------------------------------
// Name normalization

/// Titles and diacritic folding table, loaded from resources/name_rules.json.
struct NameRules {
    std::vector<std::string> titles;
    std::vector<std::string> title_suffixes;
    std::vector<std::pair<std::string, std::string>> diacritics;

    static NameRules from_json(json const& j)
    {
        NameRules r;
        r.titles = j.at("titles").get<std::vector<std::string>>();
        r.title_suffixes = j.value("title_suffixes", std::vector<std::string>{});
        for (auto const& [from, to] : j.at("diacritics").items()) {
            r.diacritics.emplace_back(from, to.get<std::string>());
        }
        // Longest match first so multi-byte keys never shadow each other.
        std::stable_sort(r.diacritics.begin(), r.diacritics.end(),
                         [](auto const& a, auto const& b) { return a.first.size() > b.first.size(); });
        return r;
    }

    static NameRules load(std::filesystem::path const& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw Error(Error::Kind::Io, "cannot open name rules file " + path.string());
        }
        return from_json(json::parse(in));
    }

    [[nodiscard]] bool is_title(std::string_view token) const
    {
        for (auto const& t : titles) {
            if (token == t) {
                return true;
            }
        }
        for (auto const& suffix : title_suffixes) {
            if (token.size() >= suffix.size() &&
                token.substr(token.size() - suffix.size()) == suffix) {
                const auto head = token.substr(0, token.size() - suffix.size());
                if (head.empty()) {
                    return true;
                }
                for (auto const& t : titles) {
                    if (head == t) {
                        return true;
                    }
                }
            }
        }
        return false;
    }
};

/// Lowercases, folds diacritics and collapses whitespace.
inline std::string fold_text(std::string_view raw, NameRules const& rules)
{
    const std::string lowered = detail::lower_utf8(raw);
    std::string folded;
    folded.reserve(lowered.size());
    for (std::size_t i = 0; i < lowered.size();) {
        bool replaced = false;
        for (auto const& [from, to] : rules.diacritics) {
            if (!from.empty() && lowered.compare(i, from.size(), from) == 0) {
                folded += to;
                i += from.size();
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            folded.push_back(lowered[i]);
            ++i;
        }
    }
    return detail::collapse_whitespace(folded);
}

inline std::string normalize_person_name(std::string_view raw, NameRules const& rules)
{
    if (detail::trim(raw).empty()) {
        throw Error(Error::Kind::InvalidInput, "person name must not be empty");
    }
    const std::string folded = fold_text(raw, rules);
    std::string out;
    std::size_t start = 0;
    while (start < folded.size()) {
        auto end = folded.find(' ', start);
        if (end == std::string::npos) {
            end = folded.size();
        }
        const std::string_view token(folded.data() + start, end - start);
        if (!rules.is_title(token)) {
            if (!out.empty()) {
                out.push_back(' ');
            }
            out.append(token);
        }
        start = end + 1;
    }
    if (out.empty()) {
        throw Error(Error::Kind::InvalidInput, "person name consists only of titles: '" + std::string(raw) + "'");
    }
    return out;
}

/// Area labels compare by lowercase form with collapsed whitespace.
inline std::string normalize_label(std::string_view label)
{
    return detail::collapse_whitespace(detail::lower_utf8(label));
}

// ---------------------------------------------------------------------------
// Publication identity

namespace detail {

inline bool is_title_punctuation(char32_t cp) noexcept
{
    if (cp < 0x80) {
        return cp >= 33 && cp <= 126 && !is_ascii_alnum(static_cast<char>(cp));
    }
    return cp >= 0x2010 && cp <= 0x205F;
}

}  // namespace detail

inline std::string dedup_key(std::string_view title, std::optional<int> year)
{
    if (detail::trim(title).empty()) {
        throw Error(Error::Kind::InvalidInput, "publication title must not be empty");
    }
    std::string cleaned;
    cleaned.reserve(title.size());
    detail::for_each_codepoint(title, [&](char32_t cp) {
        if (detail::is_title_punctuation(cp)) {
            cleaned.push_back(' ');
        } else {
            detail::append_utf8(cleaned, detail::to_lower(cp));
        }
    });
    std::string key = detail::collapse_whitespace(cleaned);
    if (key.empty()) {
        throw Error(Error::Kind::InvalidInput, "publication title '" + std::string(title) + "' has no words");
    }
    key.push_back('|');
    key += year ? std::to_string(*year) : std::string("?");
    return key;
}

inline PublicationId publication_id_for_key(std::string_view key)
{
    char buf[24];
    std::snprintf(buf, sizeof(buf), "p-%016llx", static_cast<unsigned long long>(detail::fnv1a64(key)));
    return PublicationId{buf};
}

inline PublicationId publication_id_for(std::string_view title, std::optional<int> year)
{
    return publication_id_for_key(dedup_key(title, year));
}

// ---------------------------------------------------------------------------
// JSON mapping

inline void to_json(json& j, ResearcherId const& id) { j = id.value; }
inline void from_json(json const& j, ResearcherId& id) { id.value = j.get<std::string>(); }
inline void to_json(json& j, PublicationId const& id) { j = id.value; }
inline void from_json(json const& j, PublicationId& id) { id.value = j.get<std::string>(); }

inline void to_json(json& j, AreaAssignment const& a)
{
    j = json{{"label", a.label}, {"source", std::string(to_string(a.source))}, {"confidence", a.confidence}};
}

inline void from_json(json const& j, AreaAssignment& a)
{
    a.label = j.at("label").get<std::string>();
    a.source = area_source_from_string(j.at("source").get<std::string>());
    a.confidence = j.at("confidence").get<double>();
}

inline void to_json(json& j, ResearcherStub const& s)
{
    j = json{{"name", s.full_name},   {"department", s.department},   {"email", s.email},
             {"phone", s.phone},      {"institution", s.institution}, {"areas", s.website_areas}};
}

inline void from_json(json const& j, ResearcherStub& s)
{
    s.full_name = j.at("name").get<std::string>();
    s.department = j.value("department", "");
    s.email = j.value("email", "");
    s.phone = j.value("phone", "");
    s.institution = j.value("institution", "");
    s.website_areas = j.value("areas", std::vector<std::string>{});
}

inline void to_json(json& j, PublicationRef const& r)
{
    j = json{{"title", r.title}};
    if (r.year) {
        j["year"] = *r.year;
    }
}

inline void from_json(json const& j, PublicationRef& r)
{
    r.title = j.at("title").get<std::string>();
    r.year.reset();
    if (j.contains("year") && !j.at("year").is_null()) {
        r.year = j.at("year").get<int>();
    }
}

inline void to_json(json& j, ScholarProfileRecord const& p)
{
    json citations = json::object();
    for (auto const& [year, count] : p.citation_counts_by_year) {
        citations[std::to_string(year)] = count;
    }
    j = json{{"display_name", p.display_name},
             {"affiliation", p.affiliation},
             {"verified_email_domain", p.verified_email_domain},
             {"stated_areas", p.stated_areas},
             {"citation_counts_by_year", citations},
             {"publication_refs", p.publication_refs},
             {"co_authors", p.co_authors},
             {"profile_url", p.profile_url}};
}

inline void from_json(json const& j, ScholarProfileRecord& p)
{
    p.display_name = j.at("display_name").get<std::string>();
    p.affiliation = j.value("affiliation", "");
    p.verified_email_domain = j.value("verified_email_domain", "");
    p.stated_areas = j.value("stated_areas", std::vector<std::string>{});
    p.citation_counts_by_year.clear();
    if (j.contains("citation_counts_by_year")) {
        for (auto const& [year, count] : j.at("citation_counts_by_year").items()) {
            const auto c = count.get<std::int64_t>();
            if (c < 0) {
                throw Error(Error::Kind::Parse, "negative citation count for " + p.display_name);
            }
            p.citation_counts_by_year[std::stoi(year)] = c;
        }
    }
    p.publication_refs = j.value("publication_refs", std::vector<PublicationRef>{});
    p.co_authors = j.value("co_authors", std::vector<std::string>{});
    p.profile_url = j.value("profile_url", "");
}

inline void to_json(json& j, Researcher const& r)
{
    j = json{{"id", r.id},
             {"stub", r.stub},
             {"profile", r.profile ? json(*r.profile) : json(nullptr)},
             {"match_score", r.match_score ? json(*r.match_score) : json(nullptr)},
             {"needs_review", r.needs_review},
             {"areas", r.areas},
             {"publication_ids", r.publication_ids}};
}

inline void from_json(json const& j, Researcher& r)
{
    r.id = j.at("id").get<ResearcherId>();
    r.stub = j.at("stub").get<ResearcherStub>();
    r.profile.reset();
    if (j.contains("profile") && !j.at("profile").is_null()) {
        r.profile = j.at("profile").get<ScholarProfileRecord>();
    }
    r.match_score.reset();
    if (j.contains("match_score") && !j.at("match_score").is_null()) {
        r.match_score = j.at("match_score").get<double>();
    }
    r.needs_review = j.value("needs_review", false);
    r.areas = j.value("areas", std::vector<AreaAssignment>{});
    r.publication_ids = j.value("publication_ids", std::vector<PublicationId>{});
}

inline void to_json(json& j, Publication const& p)
{
    j = json{{"id", p.id},
             {"title", p.title},
             {"authors", p.authors},
             {"year", p.year ? json(*p.year) : json(nullptr)},
             {"source_url", p.source_url ? json(*p.source_url) : json(nullptr)},
             {"body_text", p.body_text},
             {"language", std::string(to_string(p.language))},
             {"area_assignments", p.area_assignments},
             {"owners", p.owners}};
}

inline void from_json(json const& j, Publication& p)
{
    p.id = j.at("id").get<PublicationId>();
    p.title = j.at("title").get<std::string>();
    p.authors = j.value("authors", std::vector<std::string>{});
    p.year.reset();
    if (j.contains("year") && !j.at("year").is_null()) {
        p.year = j.at("year").get<int>();
    }
    p.source_url.reset();
    if (j.contains("source_url") && !j.at("source_url").is_null()) {
        p.source_url = j.at("source_url").get<std::string>();
    }
    p.body_text = j.value("body_text", "");
    p.language = lang_from_string(j.value("language", "und"));
    p.area_assignments = j.value("area_assignments", std::vector<AreaAssignment>{});
    p.owners = j.value("owners", std::vector<ResearcherId>{});
}

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Error::Kind::Io, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(std::filesystem::path const& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    // Write-then-rename keeps readers from ever observing a partial file.
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(Error::Kind::Io, "cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error(Error::Kind::Io, "write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ris
