#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ris/corpus_model.hpp"
#include "ris/docproc.hpp"
#include "ris/ingestion.hpp"

namespace ris::index {

enum class Field : std::uint8_t { title = 0, body = 1, areas = 2 };

inline constexpr std::array<Field, 3> kFields = {Field::title, Field::body, Field::areas};

inline std::string_view to_string(Field f) noexcept
{
    switch (f) {
        case Field::title:
            return "title";
        case Field::body:
            return "body";
        case Field::areas:
            return "areas";
    }
    return "title";
}

inline std::size_t slot(Field f) noexcept { return static_cast<std::size_t>(f); }

struct Posting {
    PublicationId doc;
    Field field = Field::title;
    std::uint32_t term_frequency = 0;

    bool operator==(Posting const&) const = default;
};

using FieldLengths = std::array<std::uint32_t, 3>;

/// Immutable inverted index plus the researcher tables needed for expert
/// ranking and browsing. Built once, then only read.
struct IndexSnapshot {
    static constexpr int kVersion = 1;

    // term -> postings, ordered by (doc, field)
    std::map<std::string, std::vector<Posting>> postings;
    std::map<PublicationId, FieldLengths> doc_lengths;
    std::array<double, 3> avg_field_lengths{0.0, 0.0, 0.0};
    std::size_t doc_count = 0;
    std::map<ResearcherId, std::vector<PublicationId>> researcher_docs;
    std::map<ResearcherId, std::vector<AreaAssignment>> researcher_areas;
    // normalized classifier labels per document
    std::map<PublicationId, std::vector<std::string>> doc_areas;
    std::map<PublicationId, std::string> doc_titles;
    // normalized label -> every original spelling seen in the corpus
    std::map<std::string, std::set<std::string>> label_forms;
    std::int64_t build_timestamp = 0;

    bool operator==(IndexSnapshot const&) const = default;

    [[nodiscard]] double avg_length(Field f) const noexcept { return avg_field_lengths[slot(f)]; }
};

// ---------------------------------------------------------------------------
// Build

struct BuildOptions {
    std::int64_t build_timestamp = 0;
};

inline IndexSnapshot build_index(ingestion::CorpusStore const& store, BuildOptions const& opts = {})
{
    IndexSnapshot snap;
    snap.build_timestamp = opts.build_timestamp;
    std::array<std::uint64_t, 3> totals{0, 0, 0};

    auto remember_form = [&](std::string const& label) {
        const auto norm = normalize_label(label);
        if (!norm.empty()) {
            snap.label_forms[norm].insert(std::string(::ris::detail::trim(label)));
        }
    };

    for (auto const& [pid, pub] : store.publications()) {
        std::string area_text;
        std::set<std::string> labels;
        for (auto const& a : pub.area_assignments) {
            if (!area_text.empty()) {
                area_text.push_back(' ');
            }
            area_text += a.label;
            labels.insert(normalize_label(a.label));
            remember_form(a.label);
        }
        const std::array<std::vector<std::string>, 3> fields = {
            docproc::token_texts(pub.title), docproc::token_texts(pub.body_text), docproc::token_texts(area_text)};

        FieldLengths lengths{};
        for (auto f : kFields) {
            auto const& toks = fields[slot(f)];
            lengths[slot(f)] = static_cast<std::uint32_t>(toks.size());
            totals[slot(f)] += toks.size();
            std::map<std::string, std::uint32_t> tf;
            for (auto const& t : toks) {
                ++tf[t];
            }
            for (auto const& [term, n] : tf) {
                snap.postings[term].push_back({pid, f, n});
            }
        }
        snap.doc_lengths.emplace(pid, lengths);
        snap.doc_areas.emplace(pid, std::vector<std::string>(labels.begin(), labels.end()));
        snap.doc_titles.emplace(pid, pub.title);
    }
    // Documents are visited in id order and fields in enum order, so every
    // posting list is already sorted by (doc, field).
    snap.doc_count = snap.doc_lengths.size();
    if (snap.doc_count > 0) {
        for (auto f : kFields) {
            snap.avg_field_lengths[slot(f)] =
                static_cast<double>(totals[slot(f)]) / static_cast<double>(snap.doc_count);
        }
    }

    for (auto const& [rid, r] : store.researchers()) {
        std::vector<PublicationId> docs;
        for (auto const& pid : r.publication_ids) {
            if (snap.doc_lengths.count(pid) != 0) {
                docs.push_back(pid);
            }
        }
        std::sort(docs.begin(), docs.end());
        docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
        snap.researcher_docs.emplace(rid, std::move(docs));
        snap.researcher_areas.emplace(rid, r.areas);
        for (auto const& l : r.stub.website_areas) {
            remember_form(l);
        }
        if (r.profile) {
            for (auto const& l : r.profile->stated_areas) {
                remember_form(l);
            }
        }
    }
    return snap;
}

// ---------------------------------------------------------------------------
// Scoring

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

inline double bm25_field_score(double tf, double df, double n, double field_len, double avg_field_len,
                               Bm25Params const& p = {})
{
    if (!(tf >= 1.0) || !(df >= 1.0) || !(df <= n) || !(field_len > 0.0) || !(avg_field_len > 0.0)) {
        throw Error(Error::Kind::InvalidInput, "bm25_field_score: arguments outside the domain "
                                               "(tf >= 1, 1 <= df <= N, lengths > 0)");
    }
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    return idf * tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * field_len / avg_field_len));
}

struct SearchWeights {
    double title = 2.5;
    double areas = 3.0;
    double body = 1.0;

    [[nodiscard]] double of(Field f) const noexcept
    {
        switch (f) {
            case Field::title:
                return title;
            case Field::body:
                return body;
            case Field::areas:
                return areas;
        }
        return 0.0;
    }
};

struct ScoredDoc {
    PublicationId id;
    double score = 0.0;

    bool operator==(ScoredDoc const&) const = default;
};

/// Distinct query terms in lexicographic order.
inline std::vector<std::string> query_terms(std::string_view q)
{
    auto terms = docproc::token_texts(q);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

/// Field-weighted BM25 over the snapshot. Each distinct query term counts
/// once. Zero-score documents are omitted; ties go to the smaller id.
inline std::vector<ScoredDoc> search_documents(std::string_view q, IndexSnapshot const& snap,
                                               SearchWeights const& w = {}, Bm25Params const& p = {})
{
    // Accumulation order (term, then title/areas/body) is fixed so scores are
    // reproducible bit for bit.
    static constexpr std::array<Field, 3> order = {Field::title, Field::areas, Field::body};
    std::map<PublicationId, double> acc;
    const double n = static_cast<double>(snap.doc_count);
    for (auto const& term : query_terms(q)) {
        auto it = snap.postings.find(term);
        if (it == snap.postings.end()) {
            continue;
        }
        std::array<std::size_t, 3> df{0, 0, 0};
        for (auto const& post : it->second) {
            ++df[slot(post.field)];
        }
        for (auto f : order) {
            const double weight = w.of(f);
            for (auto const& post : it->second) {
                if (post.field != f) {
                    continue;
                }
                const auto& len = snap.doc_lengths.at(post.doc);
                acc[post.doc] += weight * bm25_field_score(post.term_frequency, static_cast<double>(df[slot(f)]), n,
                                                           len[slot(f)], snap.avg_length(f), p);
            }
        }
    }
    std::vector<ScoredDoc> out;
    for (auto const& [id, s] : acc) {
        if (s > 0.0) {
            out.push_back({id, s});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](ScoredDoc const& a, ScoredDoc const& b) { return a.score > b.score; });
    return out;
}

// ---------------------------------------------------------------------------
// Experts

struct RankConfig {
    std::array<double, 3> decay = {1.0, 0.5, 0.25};
    double area_bonus = 2.0;
};

struct ExpertHit {
    ResearcherId researcher;
    double score = 0.0;
    std::vector<std::string> matched_areas;
    std::vector<ScoredDoc> top_documents;
    std::string explanation;
};

/// Normalized area labels of a researcher, without duplicates, sorted.
inline std::vector<std::string> distinct_labels(std::vector<AreaAssignment> const& areas)
{
    std::set<std::string> s;
    for (auto const& a : areas) {
        auto n = normalize_label(a.label);
        if (!n.empty()) {
            s.insert(std::move(n));
        }
    }
    return {s.begin(), s.end()};
}

inline bool label_matches_query(std::string const& normalized_label, std::string const& normalized_query,
                                std::vector<std::string> const& query_tokens)
{
    if (normalized_label == normalized_query) {
        return true;
    }
    if (query_tokens.empty()) {
        return false;
    }
    const auto label_tokens = docproc::token_texts(normalized_label);
    return std::all_of(query_tokens.begin(), query_tokens.end(), [&](std::string const& t) {
        return std::find(label_tokens.begin(), label_tokens.end(), t) != label_tokens.end();
    });
}

inline std::vector<ExpertHit> rank_experts(std::string_view q, IndexSnapshot const& snap, RankConfig const& cfg = {},
                                           SearchWeights const& w = {}, Bm25Params const& p = {})
{
    std::map<PublicationId, double> doc_scores;
    for (auto const& d : search_documents(q, snap, w, p)) {
        doc_scores.emplace(d.id, d.score);
    }
    const auto nq = normalize_label(q);
    const auto qt = docproc::token_texts(q);

    std::set<ResearcherId> everyone;
    for (auto const& [rid, _] : snap.researcher_docs) {
        everyone.insert(rid);
    }
    for (auto const& [rid, _] : snap.researcher_areas) {
        everyone.insert(rid);
    }

    std::vector<ExpertHit> out;
    for (auto const& rid : everyone) {
        ExpertHit hit;
        hit.researcher = rid;
        if (auto it = snap.researcher_docs.find(rid); it != snap.researcher_docs.end()) {
            for (auto const& pid : it->second) {
                if (auto s = doc_scores.find(pid); s != doc_scores.end()) {
                    hit.top_documents.push_back({pid, s->second});
                }
            }
        }
        std::stable_sort(hit.top_documents.begin(), hit.top_documents.end(),
                         [](ScoredDoc const& a, ScoredDoc const& b) { return a.score > b.score; });
        if (hit.top_documents.size() > 3) {
            hit.top_documents.resize(3);
        }
        if (auto it = snap.researcher_areas.find(rid); it != snap.researcher_areas.end()) {
            for (auto const& label : distinct_labels(it->second)) {
                if (label_matches_query(label, nq, qt)) {
                    hit.matched_areas.push_back(label);
                }
            }
        }
        double score = 0.0;
        for (std::size_t i = 0; i < hit.top_documents.size(); ++i) {
            score += cfg.decay[i] * hit.top_documents[i].score;
        }
        score += cfg.area_bonus * static_cast<double>(hit.matched_areas.size());
        if (!(score > 0.0)) {
            continue;
        }
        hit.score = score;

        char buf[96];
        std::snprintf(buf, sizeof(buf), "%zu matching publication%s", hit.top_documents.size(),
                      hit.top_documents.size() == 1 ? "" : "s");
        hit.explanation = buf;
        if (!hit.top_documents.empty()) {
            std::snprintf(buf, sizeof(buf), " (best %.4f)", hit.top_documents.front().score);
            hit.explanation += buf;
        }
        if (!hit.matched_areas.empty()) {
            hit.explanation += "; area match: ";
            for (std::size_t i = 0; i < hit.matched_areas.size(); ++i) {
                hit.explanation += (i ? ", " : "") + hit.matched_areas[i];
            }
        }
        out.push_back(std::move(hit));
    }
    std::stable_sort(out.begin(), out.end(), [](ExpertHit const& a, ExpertHit const& b) { return a.score > b.score; });
    return out;
}

// ---------------------------------------------------------------------------
// Browsing

struct FieldRow {
    std::string label;
    std::string normalized;
    std::size_t researcher_count = 0;
    std::size_t publication_count = 0;

    bool operator==(FieldRow const&) const = default;
};

inline std::vector<FieldRow> list_research_fields(IndexSnapshot const& snap)
{
    std::map<std::string, std::size_t> researchers;
    for (auto const& [rid, areas] : snap.researcher_areas) {
        for (auto const& l : distinct_labels(areas)) {
            ++researchers[l];
        }
    }
    std::map<std::string, std::size_t> pubs;
    for (auto const& [pid, labels] : snap.doc_areas) {
        for (auto const& l : labels) {
            ++pubs[l];
        }
    }
    std::vector<FieldRow> rows;
    for (auto const& [norm, count] : researchers) {
        FieldRow row;
        row.normalized = norm;
        auto forms = snap.label_forms.find(norm);
        row.label = (forms != snap.label_forms.end() && !forms->second.empty()) ? *forms->second.begin() : norm;
        row.researcher_count = count;
        auto pc = pubs.find(norm);
        row.publication_count = pc == pubs.end() ? 0 : pc->second;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](FieldRow const& a, FieldRow const& b) { return a.researcher_count > b.researcher_count; });
    return rows;
}

struct CloudItem {
    std::string text;
    std::size_t weight = 0;

    bool operator==(CloudItem const&) const = default;
};

/// Items a single area label contributes to the word cloud. One-token labels
/// stay whole; longer labels yield their stopword-filtered bigrams, falling
/// back to the whole label when every pair is filtered.
inline std::vector<std::string> cloud_items_for_label(std::string const& normalized_label,
                                                      docproc::Stopwords const& stopwords)
{
    const auto toks = docproc::tokenize(normalized_label);
    if (toks.empty()) {
        return {};
    }
    if (toks.size() == 1) {
        return {toks.front().text};
    }
    const auto lang = docproc::detect_language(normalized_label, stopwords);
    std::vector<std::string> out;
    for (auto const& bg : docproc::bigrams(toks, stopwords.for_language(lang))) {
        out.push_back(bg.joined());
    }
    if (out.empty()) {
        out.push_back(normalized_label);
    }
    return out;
}

inline std::vector<CloudItem> wordcloud_counts(IndexSnapshot const& snap, docproc::Stopwords const& stopwords,
                                               std::optional<std::vector<std::string>> const& positive_list = {})
{
    std::optional<std::set<std::string>> allowed;
    if (positive_list) {
        allowed.emplace();
        for (auto const& l : *positive_list) {
            allowed->insert(normalize_label(l));
        }
    }
    std::map<std::string, std::set<ResearcherId>> contributors;
    for (auto const& [rid, areas] : snap.researcher_areas) {
        for (auto const& label : distinct_labels(areas)) {
            if (allowed && allowed->count(label) == 0) {
                continue;
            }
            for (auto const& item : cloud_items_for_label(label, stopwords)) {
                contributors[item].insert(rid);
            }
        }
    }
    std::vector<CloudItem> out;
    for (auto const& [text, rids] : contributors) {
        out.push_back({text, rids.size()});
    }
    std::stable_sort(out.begin(), out.end(), [](CloudItem const& a, CloudItem const& b) { return a.weight > b.weight; });
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view kSnapshotMagic = "RISIDX1\n";

inline json snapshot_to_json(IndexSnapshot const& snap)
{
    json postings = json::object();
    for (auto const& [term, list] : snap.postings) {
        json arr = json::array();
        for (auto const& p : list) {
            arr.push_back(json::array({p.doc.value, to_string(p.field), p.term_frequency}));
        }
        postings[term] = std::move(arr);
    }
    json lengths = json::object();
    for (auto const& [pid, l] : snap.doc_lengths) {
        lengths[pid.value] = json::array({l[0], l[1], l[2]});
    }
    json rdocs = json::object();
    for (auto const& [rid, docs] : snap.researcher_docs) {
        rdocs[rid.value] = docs;
    }
    json rareas = json::object();
    for (auto const& [rid, areas] : snap.researcher_areas) {
        rareas[rid.value] = areas;
    }
    json dareas = json::object();
    for (auto const& [pid, labels] : snap.doc_areas) {
        dareas[pid.value] = labels;
    }
    json titles = json::object();
    for (auto const& [pid, t] : snap.doc_titles) {
        titles[pid.value] = t;
    }
    json forms = json::object();
    for (auto const& [norm, set] : snap.label_forms) {
        forms[norm] = std::vector<std::string>(set.begin(), set.end());
    }
    return json{{"version", IndexSnapshot::kVersion},
                {"build_timestamp", snap.build_timestamp},
                {"doc_count", snap.doc_count},
                {"avg_field_lengths",
                 {{"title", snap.avg_field_lengths[0]},
                  {"body", snap.avg_field_lengths[1]},
                  {"areas", snap.avg_field_lengths[2]}}},
                {"postings", std::move(postings)},
                {"doc_lengths", std::move(lengths)},
                {"researcher_docs", std::move(rdocs)},
                {"researcher_areas", std::move(rareas)},
                {"doc_areas", std::move(dareas)},
                {"doc_titles", std::move(titles)},
                {"label_forms", std::move(forms)}};
}

inline Field field_from_string(std::string_view s)
{
    if (s == "title") {
        return Field::title;
    }
    if (s == "body") {
        return Field::body;
    }
    if (s == "areas") {
        return Field::areas;
    }
    throw Error(Error::Kind::Parse, "unknown index field '" + std::string(s) + "'");
}

/// Checks the structural invariants of a loaded snapshot.
inline void validate_snapshot(IndexSnapshot const& snap)
{
    if (snap.doc_count != snap.doc_lengths.size()) {
        throw Error(Error::Kind::Parse, "snapshot doc_count does not match doc_lengths");
    }
    for (auto const& [term, list] : snap.postings) {
        for (auto const& p : list) {
            if (snap.doc_lengths.count(p.doc) == 0) {
                throw Error(Error::Kind::Parse, "posting for '" + term + "' references unknown document");
            }
            if (p.term_frequency == 0) {
                throw Error(Error::Kind::Parse, "posting for '" + term + "' has zero term frequency");
            }
        }
    }
    for (auto f : kFields) {
        std::uint64_t total = 0;
        for (auto const& [pid, l] : snap.doc_lengths) {
            total += l[slot(f)];
        }
        const double expect = snap.doc_count ? static_cast<double>(total) / static_cast<double>(snap.doc_count) : 0.0;
        if (std::abs(expect - snap.avg_field_lengths[slot(f)]) > 1e-9 * std::max(1.0, expect)) {
            throw Error(Error::Kind::Parse, "snapshot average field length is inconsistent");
        }
    }
}

inline IndexSnapshot snapshot_from_json(json const& j)
{
    if (!j.contains("version") || j.at("version") != IndexSnapshot::kVersion) {
        throw Error(Error::Kind::Parse, "unsupported snapshot version " +
                                            (j.contains("version") ? j.at("version").dump() : std::string("(none)")));
    }
    IndexSnapshot snap;
    snap.build_timestamp = j.at("build_timestamp").get<std::int64_t>();
    snap.doc_count = j.at("doc_count").get<std::size_t>();
    auto const& avg = j.at("avg_field_lengths");
    for (auto f : kFields) {
        snap.avg_field_lengths[slot(f)] = avg.at(std::string(to_string(f))).get<double>();
    }
    for (auto const& [term, arr] : j.at("postings").items()) {
        auto& list = snap.postings[term];
        for (auto const& p : arr) {
            list.push_back({PublicationId{p.at(0).get<std::string>()}, field_from_string(p.at(1).get<std::string>()),
                            p.at(2).get<std::uint32_t>()});
        }
    }
    for (auto const& [pid, l] : j.at("doc_lengths").items()) {
        snap.doc_lengths[PublicationId{pid}] = {l.at(0).get<std::uint32_t>(), l.at(1).get<std::uint32_t>(),
                                                l.at(2).get<std::uint32_t>()};
    }
    for (auto const& [rid, docs] : j.at("researcher_docs").items()) {
        snap.researcher_docs[ResearcherId{rid}] = docs.get<std::vector<PublicationId>>();
    }
    for (auto const& [rid, areas] : j.at("researcher_areas").items()) {
        snap.researcher_areas[ResearcherId{rid}] = areas.get<std::vector<AreaAssignment>>();
    }
    for (auto const& [pid, labels] : j.at("doc_areas").items()) {
        snap.doc_areas[PublicationId{pid}] = labels.get<std::vector<std::string>>();
    }
    for (auto const& [pid, t] : j.at("doc_titles").items()) {
        snap.doc_titles[PublicationId{pid}] = t.get<std::string>();
    }
    for (auto const& [norm, forms] : j.at("label_forms").items()) {
        auto v = forms.get<std::vector<std::string>>();
        snap.label_forms[norm] = std::set<std::string>(v.begin(), v.end());
    }
    validate_snapshot(snap);
    return snap;
}

inline std::string serialize_snapshot(IndexSnapshot const& snap)
{
    std::string out(kSnapshotMagic);
    out += snapshot_to_json(snap).dump();
    out.push_back('\n');
    return out;
}

inline IndexSnapshot parse_snapshot(std::string_view bytes)
{
    if (bytes.substr(0, kSnapshotMagic.size()) != kSnapshotMagic) {
        const auto nl = bytes.find('\n');
        throw Error(Error::Kind::Parse, "not a version 1 index snapshot (header '" +
                                            std::string(bytes.substr(0, std::min<std::size_t>(nl, 16))) + "')");
    }
    json j;
    try {
        j = json::parse(bytes.substr(kSnapshotMagic.size()));
    } catch (json::parse_error const& e) {
        throw Error(Error::Kind::Parse, std::string("corrupt snapshot: ") + e.what());
    }
    try {
        return snapshot_from_json(j);
    } catch (json::exception const& e) {
        throw Error(Error::Kind::Parse, std::string("corrupt snapshot: ") + e.what());
    }
}

inline void save_snapshot(IndexSnapshot const& snap, std::filesystem::path const& path)
{
    write_file(path, serialize_snapshot(snap));
}

inline IndexSnapshot load_snapshot(std::filesystem::path const& path) { return parse_snapshot(read_file(path)); }

// ---------------------------------------------------------------------------
// JSON views used by the API and CLI

inline json to_json_value(ScoredDoc const& d) { return json{{"id", d.id.value}, {"score", d.score}}; }

inline json to_json_value(ExpertHit const& h)
{
    json docs = json::array();
    for (auto const& d : h.top_documents) {
        docs.push_back(to_json_value(d));
    }
    return json{{"researcher", h.researcher.value},
                {"score", h.score},
                {"matched_areas", h.matched_areas},
                {"top_documents", std::move(docs)},
                {"explanation", h.explanation}};
}

inline json to_json_value(FieldRow const& r)
{
    return json{{"label", r.label},
                {"normalized", r.normalized},
                {"researcher_count", r.researcher_count},
                {"publication_count", r.publication_count}};
}

inline json to_json_value(CloudItem const& c) { return json{{"text", c.text}, {"weight", c.weight}}; }

}  // namespace ris::index
