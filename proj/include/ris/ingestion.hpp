#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ris/corpus_model.hpp"
#include "ris/docproc.hpp"

namespace ris::ingestion {

// ---------------------------------------------------------------------------
// Roster

enum class RosterFormat { csv, json };

struct RowError {
    std::size_t row = 0;  // 1-based data row (header excluded)
    std::string message;

    bool operator==(RowError const&) const = default;
};

struct RosterParseResult {
    std::vector<ResearcherStub> stubs;
    std::vector<RowError> errors;
    std::vector<std::string> warnings;
};

namespace detail_csv {

// RFC 4180 records: quoted fields may contain commas, doubled quotes and
// newlines. Returns the records along with the physical line each started on.
struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

inline std::vector<Record> parse(std::string_view text)
{
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) {
            records.push_back(std::move(current));
        }
        current = Record{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            ++line;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw Error(Error::Kind::Parse, "unterminated quoted field starting on line " + std::to_string(current.line));
    }
    if (!field.empty() || !current.fields.empty()) {
        end_record();
    }
    return records;
}

}  // namespace detail_csv

inline std::vector<std::string> split_areas(std::string_view cell)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= cell.size()) {
        auto end = cell.find(';', start);
        if (end == std::string_view::npos) {
            end = cell.size();
        }
        const auto item = ::ris::detail::trim(cell.substr(start, end - start));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        start = end + 1;
    }
    return out;
}

inline std::optional<std::string> validate_stub(ResearcherStub const& s)
{
    if (::ris::detail::trim(s.full_name).empty()) {
        return "empty name";
    }
    if (!s.email.empty() && std::count(s.email.begin(), s.email.end(), '@') != 1) {
        return "email '" + s.email + "' must contain exactly one '@'";
    }
    return std::nullopt;
}

/// Parses a roster. Required columns: name, department, email, phone,
/// institution. An optional `areas` column carries semicolon-separated
/// website research areas. Invalid rows are reported, the rest parsed.
inline RosterParseResult parse_roster(std::string_view bytes, RosterFormat format, NameRules const& rules)
{
    static const std::vector<std::string> required{"name", "department", "email", "phone", "institution"};
    if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") {
        bytes.remove_prefix(3);
    }

    RosterParseResult result;
    std::vector<std::optional<ResearcherStub>> rows;

    if (format == RosterFormat::csv) {
        const auto records = detail_csv::parse(bytes);
        if (records.empty()) {
            throw Error(Error::Kind::Parse, "roster is empty: missing header row");
        }
        std::map<std::string, std::size_t> column;
        for (std::size_t i = 0; i < records[0].fields.size(); ++i) {
            column[std::string(::ris::detail::trim(records[0].fields[i]))] = i;
        }
        for (auto const& name : required) {
            if (column.count(name) == 0) {
                throw Error(Error::Kind::Parse, "roster header is missing column '" + name + "'");
            }
        }
        const auto areas_col = column.count("areas") ? std::optional<std::size_t>(column["areas"]) : std::nullopt;
        for (std::size_t r = 1; r < records.size(); ++r) {
            auto const& rec = records[r];
            if (rec.fields.size() != records[0].fields.size()) {
                result.errors.push_back({r, "expected " + std::to_string(records[0].fields.size()) + " fields, got " +
                                                std::to_string(rec.fields.size()) + " (line " +
                                                std::to_string(rec.line) + ")"});
                rows.emplace_back();
                continue;
            }
            auto cell = [&](std::string const& key) {
                return std::string(::ris::detail::trim(rec.fields[column.at(key)]));
            };
            ResearcherStub s;
            s.full_name = cell("name");
            s.department = cell("department");
            s.email = cell("email");
            s.phone = cell("phone");
            s.institution = cell("institution");
            if (areas_col) {
                s.website_areas = split_areas(rec.fields[*areas_col]);
            }
            rows.emplace_back(std::move(s));
        }
    } else {
        json doc;
        try {
            doc = json::parse(bytes);
        } catch (json::parse_error const& e) {
            throw Error(Error::Kind::Parse, std::string("roster JSON: ") + e.what());
        }
        if (!doc.is_array()) {
            throw Error(Error::Kind::Parse, "roster JSON must be an array of objects");
        }
        for (std::size_t r = 0; r < doc.size(); ++r) {
            auto const& obj = doc[r];
            if (!obj.is_object()) {
                result.errors.push_back({r + 1, "row is not an object"});
                rows.emplace_back();
                continue;
            }
            bool ok = true;
            for (auto const& name : required) {
                if (!obj.contains(name) || !obj.at(name).is_string()) {
                    result.errors.push_back({r + 1, "missing or non-string key '" + name + "'"});
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                rows.emplace_back();
                continue;
            }
            ResearcherStub s;
            s.full_name = ::ris::detail::trim(obj.at("name").get<std::string>());
            s.department = ::ris::detail::trim(obj.at("department").get<std::string>());
            s.email = ::ris::detail::trim(obj.at("email").get<std::string>());
            s.phone = ::ris::detail::trim(obj.at("phone").get<std::string>());
            s.institution = ::ris::detail::trim(obj.at("institution").get<std::string>());
            if (obj.contains("areas")) {
                auto const& a = obj.at("areas");
                if (a.is_array()) {
                    for (auto const& item : a) {
                        if (item.is_string() && !::ris::detail::trim(item.get<std::string>()).empty()) {
                            s.website_areas.emplace_back(::ris::detail::trim(item.get<std::string>()));
                        }
                    }
                } else if (a.is_string()) {
                    s.website_areas = split_areas(a.get<std::string>());
                }
            }
            rows.emplace_back(std::move(s));
        }
    }

    std::map<std::pair<std::string, std::string>, std::size_t> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i]) {
            continue;
        }
        auto& s = *rows[i];
        if (auto problem = validate_stub(s)) {
            result.errors.push_back({i + 1, *problem});
            continue;
        }
        std::string normalized;
        try {
            normalized = normalize_person_name(s.full_name, rules);
        } catch (Error const& e) {
            result.errors.push_back({i + 1, e.what()});
            continue;
        }
        const auto key = std::make_pair(normalized, fold_text(s.department, rules));
        if (auto it = seen.find(key); it != seen.end()) {
            result.warnings.push_back("row " + std::to_string(i + 1) + " duplicates row " +
                                      std::to_string(it->second) + " (" + s.full_name + ", " + s.department + ")");
        } else {
            seen.emplace(key, i + 1);
        }
        result.stubs.push_back(std::move(s));
    }
    std::sort(result.errors.begin(), result.errors.end(),
              [](RowError const& a, RowError const& b) { return a.row < b.row; });
    return result;
}

// ---------------------------------------------------------------------------
// Profile matching

struct MatchConfig {
    double threshold = 0.7;
    double name_weight = 0.6;
    double affiliation_weight = 0.3;
    double email_weight = 0.4;
    // Accepted matches scoring below this are flagged for manual review.
    double review_below = 0.9;
};

struct MatchDecision {
    ResearcherStub stub_ref;
    std::optional<ScholarProfileRecord> candidate_ref;
    double score = 0.0;
    bool accepted = false;
    bool needs_review = false;
    std::vector<std::string> reasons;
};

inline std::string email_domain(std::string_view email)
{
    const auto at = email.find('@');
    if (at == std::string_view::npos) {
        return {};
    }
    return ::ris::detail::lower_utf8(::ris::detail::trim(email.substr(at + 1)));
}

namespace detail_match {

struct Scored {
    double score;
    std::vector<std::string> reasons;
};

inline Scored score_candidate(ResearcherStub const& stub, ScholarProfileRecord const& cand, MatchConfig const& cfg,
                              NameRules const& rules)
{
    Scored out{0.0, {}};
    double sum = 0.0;
    try {
        if (normalize_person_name(stub.full_name, rules) == normalize_person_name(cand.display_name, rules)) {
            sum += cfg.name_weight;
            out.reasons.emplace_back("name match");
        }
    } catch (Error const&) {
        // a name made only of titles cannot match anything
    }
    const auto institution = fold_text(stub.institution, rules);
    if (!institution.empty() && fold_text(cand.affiliation, rules).find(institution) != std::string::npos) {
        sum += cfg.affiliation_weight;
        out.reasons.emplace_back("affiliation contains '" + institution + "'");
    }
    const auto domain = email_domain(stub.email);
    if (!domain.empty() && domain == ::ris::detail::lower_utf8(::ris::detail::trim(cand.verified_email_domain))) {
        sum += cfg.email_weight;
        out.reasons.emplace_back("email domain " + domain);
    }
    // Round away binary noise so 0.6 + 0.3 compares equal to 0.9.
    out.score = std::min(1.0, std::round(sum * 1e12) / 1e12);
    return out;
}

}  // namespace detail_match

inline MatchDecision match_scholar_profile(ResearcherStub const& stub, std::span<const ScholarProfileRecord> candidates,
                                           MatchConfig const& cfg, NameRules const& rules)
{
    MatchDecision decision;
    decision.stub_ref = stub;
    if (candidates.empty()) {
        return decision;
    }
    std::size_t best = 0;
    detail_match::Scored best_score = detail_match::score_candidate(stub, candidates[0], cfg, rules);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        auto s = detail_match::score_candidate(stub, candidates[i], cfg, rules);
        auto const& a = candidates[i];
        auto const& b = candidates[best];
        const bool better =
            s.score > best_score.score ||
            (s.score == best_score.score &&
             (a.publication_refs.size() > b.publication_refs.size() ||
              (a.publication_refs.size() == b.publication_refs.size() && a.display_name < b.display_name)));
        if (better) {
            best = i;
            best_score = std::move(s);
        }
    }
    decision.candidate_ref = candidates[best];
    decision.score = best_score.score;
    decision.reasons = std::move(best_score.reasons);
    decision.accepted = decision.score >= cfg.threshold;
    decision.needs_review = decision.accepted && decision.score < cfg.review_below;
    return decision;
}

// ---------------------------------------------------------------------------
// Profile fetching

using namespace std::chrono_literals;

/// Source of candidate scholar profiles for a roster entry. Implementations
/// pre-filter to plausible name matches.
class ProfileFetcher {
   public:
    virtual ~ProfileFetcher() = default;

    virtual std::vector<ScholarProfileRecord> fetch(ResearcherStub const& stub) = 0;

    /// Pause between consecutive calls. Remote implementations keep the
    /// two-second default.
    [[nodiscard]] virtual std::chrono::milliseconds polite_delay() const { return 2000ms; }
};

/// Serves candidates from a fixture file: every record whose normalized
/// display name shares the surname of the stub.
class FixtureProfileFetcher final : public ProfileFetcher {
   public:
    FixtureProfileFetcher(std::vector<ScholarProfileRecord> records, NameRules rules)
        : m_records(std::move(records)), m_rules(std::move(rules))
    {
    }

    static FixtureProfileFetcher load(std::filesystem::path const& path, NameRules rules)
    {
        const auto doc = json::parse(read_file(path));
        return FixtureProfileFetcher(doc.get<std::vector<ScholarProfileRecord>>(), std::move(rules));
    }

    std::vector<ScholarProfileRecord> fetch(ResearcherStub const& stub) override
    {
        const auto want = surname(stub.full_name);
        std::vector<ScholarProfileRecord> out;
        if (want.empty()) {
            return out;
        }
        for (auto const& r : m_records) {
            if (surname(r.display_name) == want) {
                out.push_back(r);
            }
        }
        return out;
    }

    [[nodiscard]] std::chrono::milliseconds polite_delay() const override { return 0ms; }

   private:
    [[nodiscard]] std::string surname(std::string const& name) const
    {
        std::string n;
        try {
            n = normalize_person_name(name, m_rules);
        } catch (Error const&) {
            return {};
        }
        const auto sp = n.rfind(' ');
        return sp == std::string::npos ? n : n.substr(sp + 1);
    }

    std::vector<ScholarProfileRecord> m_records;
    NameRules m_rules;
};

struct FetchOutcome {
    ResearcherStub stub;
    std::vector<ScholarProfileRecord> candidates;
    bool fetched = true;
    std::string error;
};

struct FetchOptions {
    std::size_t parallelism = 1;
    std::optional<std::chrono::milliseconds> delay_override;
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };
};

/// Queries the fetcher for every stub. Failures are recorded per stub and
/// never abort the batch. Each worker waits the polite delay between its
/// consecutive calls. Output order follows input order.
inline std::vector<FetchOutcome> fetch_profiles(std::span<const ResearcherStub> stubs, ProfileFetcher& fetcher,
                                                FetchOptions const& opts = {})
{
    std::vector<FetchOutcome> out(stubs.size());
    const auto delay = opts.delay_override.value_or(fetcher.polite_delay());
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.parallelism, stubs.size()));
    std::mutex sleep_mutex;

    auto run_one = [&](std::size_t i) {
        out[i].stub = stubs[i];
        try {
            out[i].candidates = fetcher.fetch(stubs[i]);
        } catch (std::exception const& e) {
            out[i].fetched = false;
            out[i].error = e.what();
            out[i].candidates.clear();
        }
    };
    auto pause = [&] {
        if (delay.count() > 0 && opts.sleep) {
            std::lock_guard lock(sleep_mutex);
            opts.sleep(delay);
        }
    };

    if (workers == 1) {
        for (std::size_t i = 0; i < stubs.size(); ++i) {
            if (i > 0) {
                pause();
            }
            run_one(i);
        }
        return out;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < stubs.size(); i += workers) {
                if (i != w) {
                    pause();
                }
                run_one(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus store

struct IngestionStats {
    std::size_t researchers_seen = 0;
    std::size_t profiles_matched = 0;
    std::size_t publications_seen = 0;
    std::size_t publications_deduplicated = 0;
    std::size_t bodies_present = 0;

    bool operator==(IngestionStats const&) const = default;
};

inline void to_json(json& j, IngestionStats const& s)
{
    j = json{{"researchers_seen", s.researchers_seen},
             {"profiles_matched", s.profiles_matched},
             {"publications_seen", s.publications_seen},
             {"publications_deduplicated", s.publications_deduplicated},
             {"bodies_present", s.bodies_present}};
}

/// Researchers and publications keyed by id. Single writer; copies are cheap
/// enough for snapshotting at fixture scale.
class CorpusStore {
   public:
    void put_researcher(Researcher r) { m_researchers[r.id] = std::move(r); }

    [[nodiscard]] Researcher const* researcher(ResearcherId const& id) const
    {
        auto it = m_researchers.find(id);
        return it == m_researchers.end() ? nullptr : &it->second;
    }

    [[nodiscard]] Researcher* researcher(ResearcherId const& id)
    {
        auto it = m_researchers.find(id);
        return it == m_researchers.end() ? nullptr : &it->second;
    }

    [[nodiscard]] Publication const* publication(PublicationId const& id) const
    {
        auto it = m_publications.find(id);
        return it == m_publications.end() ? nullptr : &it->second;
    }

    [[nodiscard]] Publication* publication(PublicationId const& id)
    {
        auto it = m_publications.find(id);
        return it == m_publications.end() ? nullptr : &it->second;
    }

    void put_publication(Publication p) { m_publications[p.id] = std::move(p); }

    [[nodiscard]] std::map<ResearcherId, Researcher> const& researchers() const noexcept { return m_researchers; }
    [[nodiscard]] std::map<ResearcherId, Researcher>& researchers() noexcept { return m_researchers; }
    [[nodiscard]] std::map<PublicationId, Publication> const& publications() const noexcept { return m_publications; }
    [[nodiscard]] std::map<PublicationId, Publication>& publications() noexcept { return m_publications; }

    /// Rebuilds every researcher's publication list from the owner sets.
    void relink()
    {
        for (auto& [id, r] : m_researchers) {
            r.publication_ids.clear();
        }
        for (auto const& [pid, p] : m_publications) {
            for (auto const& owner : p.owners) {
                if (auto* r = researcher(owner)) {
                    r->publication_ids.push_back(pid);
                }
            }
        }
    }

    bool operator==(CorpusStore const&) const = default;

   private:
    std::map<ResearcherId, Researcher> m_researchers;
    std::map<PublicationId, Publication> m_publications;
};

struct PublicationRecord {
    ResearcherId owner_id;
    std::string title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> source_url;
    std::optional<std::string> body_text;
};

inline void from_json(json const& j, PublicationRecord& r)
{
    r.owner_id = ResearcherId{j.at("owner_id").get<std::string>()};
    r.title = j.at("title").get<std::string>();
    r.authors = j.value("authors", std::vector<std::string>{});
    r.year.reset();
    if (j.contains("year") && !j.at("year").is_null()) {
        r.year = j.at("year").get<int>();
    }
    r.source_url.reset();
    if (j.contains("source_url") && !j.at("source_url").is_null()) {
        r.source_url = j.at("source_url").get<std::string>();
    }
    r.body_text.reset();
    if (j.contains("body_text") && !j.at("body_text").is_null()) {
        r.body_text = j.at("body_text").get<std::string>();
    }
}

struct RecordParseResult {
    std::vector<PublicationRecord> records;
    std::vector<RowError> errors;  // row = line number
};

inline RecordParseResult parse_publication_records(std::string_view jsonl)
{
    RecordParseResult out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < jsonl.size()) {
        auto end = jsonl.find('\n', start);
        if (end == std::string_view::npos) {
            end = jsonl.size();
        }
        ++line_no;
        const auto line = ::ris::detail::trim(jsonl.substr(start, end - start));
        start = end + 1;
        if (line.empty()) {
            continue;
        }
        try {
            out.records.push_back(json::parse(line).get<PublicationRecord>());
        } catch (std::exception const& e) {
            out.errors.push_back({line_no, e.what()});
        }
    }
    return out;
}

struct IngestionResult {
    IngestionStats stats;
    std::vector<RowError> errors;  // row = 1-based record index
};

namespace detail_ingest {

inline void add_unique(std::vector<std::string>& into, std::vector<std::string> const& from)
{
    for (auto const& s : from) {
        if (std::find(into.begin(), into.end(), s) == into.end()) {
            into.push_back(s);
        }
    }
}

}  // namespace detail_ingest

/// Merges records into the store. Records sharing a dedup key collapse into
/// one publication: authors are unioned, the first non-empty cleaned body is
/// kept and every owner is attached. Re-ingesting a batch leaves the store
/// unchanged.
inline IngestionResult ingest_publications(std::span<const PublicationRecord> records, CorpusStore& store,
                                           docproc::Stopwords const& stopwords)
{
    IngestionResult result;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto const& rec = records[i];
        if (store.researcher(rec.owner_id) == nullptr) {
            result.errors.push_back({i + 1, "unknown researcher id '" + rec.owner_id.value + "'"});
            continue;
        }
        PublicationId id;
        try {
            id = publication_id_for(rec.title, rec.year);
        } catch (Error const& e) {
            result.errors.push_back({i + 1, e.what()});
            continue;
        }
        ++result.stats.publications_seen;
        const std::string body = rec.body_text ? docproc::clean_body(*rec.body_text) : std::string();
        if (!body.empty()) {
            ++result.stats.bodies_present;
        }

        if (auto* existing = store.publication(id)) {
            ++result.stats.publications_deduplicated;
            detail_ingest::add_unique(existing->authors, rec.authors);
            if (existing->body_text.empty() && !body.empty()) {
                existing->body_text = body;
                existing->language = docproc::detect_language(body, stopwords);
            }
            if (!existing->source_url && rec.source_url) {
                existing->source_url = rec.source_url;
            }
            if (std::find(existing->owners.begin(), existing->owners.end(), rec.owner_id) == existing->owners.end()) {
                existing->owners.push_back(rec.owner_id);
                std::sort(existing->owners.begin(), existing->owners.end());
            }
            continue;
        }
        Publication p;
        p.id = id;
        p.title = std::string(::ris::detail::trim(rec.title));
        p.authors = rec.authors;
        p.year = rec.year;
        p.source_url = rec.source_url;
        p.body_text = body;
        p.language = docproc::detect_language(body.empty() ? p.title : body, stopwords);
        p.owners = {rec.owner_id};
        store.put_publication(std::move(p));
    }
    store.relink();
    result.stats.researchers_seen = store.researchers().size();
    for (auto const& [rid, r] : store.researchers()) {
        if (r.profile) {
            ++result.stats.profiles_matched;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Roster to researchers

struct RosterIngestion {
    std::vector<Researcher> researchers;
    std::vector<MatchDecision> decisions;
    std::size_t unfetched = 0;
};

/// Assigns roster-order ids and attaches accepted profiles. `outcomes` must
/// be the fetch results for `stubs`, in the same order (may be empty when no
/// profile source is configured).
inline RosterIngestion assemble_researchers(std::span<const ResearcherStub> stubs,
                                            std::span<const FetchOutcome> outcomes, MatchConfig const& cfg,
                                            NameRules const& rules)
{
    RosterIngestion out;
    for (std::size_t i = 0; i < stubs.size(); ++i) {
        Researcher r;
        r.id = researcher_id_for_index(i + 1);
        r.stub = stubs[i];
        if (i < outcomes.size()) {
            if (!outcomes[i].fetched) {
                ++out.unfetched;
            }
            auto decision = match_scholar_profile(stubs[i], outcomes[i].candidates, cfg, rules);
            if (decision.accepted) {
                r.profile = decision.candidate_ref;
                r.match_score = decision.score;
                r.needs_review = decision.needs_review;
            }
            out.decisions.push_back(std::move(decision));
        }
        out.researchers.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

/// One publication per line, in id order.
inline std::string corpus_to_jsonl(CorpusStore const& store)
{
    std::string out;
    for (auto const& [pid, p] : store.publications()) {
        out += json(p).dump();
        out.push_back('\n');
    }
    return out;
}

inline std::string researchers_to_json(CorpusStore const& store)
{
    json arr = json::array();
    for (auto const& [rid, r] : store.researchers()) {
        arr.push_back(r);
    }
    return arr.dump(2) + "\n";
}

inline void save_corpus(CorpusStore const& store, std::filesystem::path const& corpus_path,
                        std::filesystem::path const& researchers_path)
{
    write_file(researchers_path, researchers_to_json(store));
    write_file(corpus_path, corpus_to_jsonl(store));
}

/// Missing files load as empty; malformed content is a parse error.
inline CorpusStore load_corpus(std::filesystem::path const& corpus_path, std::filesystem::path const& researchers_path)
{
    CorpusStore store;
    try {
        if (std::filesystem::exists(researchers_path)) {
            for (auto const& r : json::parse(read_file(researchers_path))) {
                store.put_researcher(r.get<Researcher>());
            }
        }
        if (std::filesystem::exists(corpus_path)) {
            const auto text = read_file(corpus_path);
            std::size_t start = 0;
            while (start < text.size()) {
                auto end = text.find('\n', start);
                if (end == std::string::npos) {
                    end = text.size();
                }
                const auto line = ::ris::detail::trim(std::string_view(text).substr(start, end - start));
                start = end + 1;
                if (!line.empty()) {
                    store.put_publication(json::parse(line).get<Publication>());
                }
            }
        }
    } catch (json::exception const& e) {
        throw Error(Error::Kind::Parse, std::string("corrupt corpus files: ") + e.what());
    }
    return store;
}

}  // namespace ris::ingestion
