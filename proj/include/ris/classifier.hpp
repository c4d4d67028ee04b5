#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ris/corpus_model.hpp"
#include "ris/docproc.hpp"
#include "ris/ingestion.hpp"

namespace ris::classifier {

struct TaxonomyEntry {
    std::string label;
    std::vector<std::string> keywords;
    std::optional<std::string> parent;
};

/// Controlled vocabulary of research areas with keyword triggers.
class Taxonomy {
   public:
    Taxonomy() = default;

    explicit Taxonomy(std::vector<TaxonomyEntry> entries) : m_entries(std::move(entries))
    {
        std::set<std::string> labels;
        for (auto const& e : m_entries) {
            const auto norm = normalize_label(e.label);
            if (norm.empty()) {
                throw Error(Error::Kind::InvalidInput, "taxonomy label must not be empty");
            }
            if (!labels.insert(norm).second) {
                throw Error(Error::Kind::InvalidInput, "duplicate taxonomy label '" + e.label + "'");
            }
        }
        m_keyword_tokens.reserve(m_entries.size());
        for (auto const& e : m_entries) {
            if (e.parent && labels.count(normalize_label(*e.parent)) == 0) {
                throw Error(Error::Kind::InvalidInput,
                            "taxonomy entry '" + e.label + "' has unknown parent '" + *e.parent + "'");
            }
            std::vector<std::vector<std::string>> compiled;
            for (auto const& k : e.keywords) {
                auto toks = docproc::token_texts(k);
                if (toks.empty() || toks.size() > 3) {
                    throw Error(Error::Kind::InvalidInput, "taxonomy keyword '" + k + "' of '" + e.label +
                                                               "' must have 1 to 3 tokens");
                }
                compiled.push_back(std::move(toks));
            }
            m_keyword_tokens.push_back(std::move(compiled));
            m_by_label.emplace(normalize_label(e.label), m_keyword_tokens.size() - 1);
        }
    }

    static Taxonomy from_json(json const& j)
    {
        std::vector<TaxonomyEntry> entries;
        for (auto const& item : j) {
            TaxonomyEntry e;
            e.label = item.at("label").get<std::string>();
            e.keywords = item.value("keywords", std::vector<std::string>{});
            if (item.contains("parent") && !item.at("parent").is_null()) {
                e.parent = item.at("parent").get<std::string>();
            }
            entries.push_back(std::move(e));
        }
        return Taxonomy(std::move(entries));
    }

    static Taxonomy load(std::filesystem::path const& path) { return from_json(json::parse(read_file(path))); }

    [[nodiscard]] std::vector<TaxonomyEntry> const& entries() const noexcept { return m_entries; }
    [[nodiscard]] bool empty() const noexcept { return m_entries.empty(); }

    [[nodiscard]] std::vector<std::vector<std::string>> const& keyword_tokens(std::size_t entry) const
    {
        return m_keyword_tokens.at(entry);
    }

    /// Taxonomy label for a free-text label, matched after normalization.
    [[nodiscard]] std::optional<std::string> canonical(std::string_view label) const
    {
        auto it = m_by_label.find(normalize_label(label));
        if (it == m_by_label.end()) {
            return std::nullopt;
        }
        return m_entries[it->second].label;
    }

   private:
    std::vector<TaxonomyEntry> m_entries;
    std::vector<std::vector<std::vector<std::string>>> m_keyword_tokens;
    std::map<std::string, std::size_t> m_by_label;
};

struct ClassifierConfig {
    std::size_t top_k = 3;
    double min_confidence = 0.15;
    double title_weight = 3.0;
    // confidence = raw / (raw + squash)
    double squash = 10.0;
};

namespace detail {

inline std::size_t count_sequence(std::vector<std::string> const& tokens, std::vector<std::string> const& seq)
{
    if (seq.empty() || tokens.size() < seq.size()) {
        return 0;
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
        if (std::equal(seq.begin(), seq.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++n;
        }
    }
    return n;
}

}  // namespace detail

inline double keyword_confidence(double raw, ClassifierConfig const& cfg) { return raw / (raw + cfg.squash); }

/// Keyword classifier. Each taxonomy entry scores
/// raw = sum over keywords of (title_weight * title hits + body hits),
/// squashed to raw / (raw + 10). Returns the top_k entries that clear
/// min_confidence, best first, ties by label.
inline std::vector<AreaAssignment> classify_document(Publication const& pub, Taxonomy const& tax,
                                                     ClassifierConfig const& cfg = {})
{
    if (tax.empty()) {
        throw Error(Error::Kind::InvalidInput, "cannot classify against an empty taxonomy");
    }
    const auto title = docproc::token_texts(pub.title);
    const auto body = docproc::token_texts(pub.body_text);
    if (title.empty() && body.empty()) {
        return {};
    }
    struct Scored {
        double confidence;
        std::string const* label;
    };
    std::vector<Scored> scored;
    for (std::size_t e = 0; e < tax.entries().size(); ++e) {
        double raw = 0.0;
        for (auto const& seq : tax.keyword_tokens(e)) {
            raw += cfg.title_weight * static_cast<double>(detail::count_sequence(title, seq)) +
                   static_cast<double>(detail::count_sequence(body, seq));
        }
        if (raw <= 0.0) {
            continue;
        }
        const double c = keyword_confidence(raw, cfg);
        if (c >= cfg.min_confidence) {
            scored.push_back({c, &tax.entries()[e].label});
        }
    }
    std::sort(scored.begin(), scored.end(), [](Scored const& a, Scored const& b) {
        if (a.confidence != b.confidence) {
            return a.confidence > b.confidence;
        }
        return *a.label < *b.label;
    });
    if (scored.size() > cfg.top_k) {
        scored.resize(cfg.top_k);
    }
    std::vector<AreaAssignment> out;
    out.reserve(scored.size());
    for (auto const& s : scored) {
        out.push_back({*s.label, AreaSource::DocumentClassifier, s.confidence});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Remote classification

/// Chat-style completion endpoint. Throws Error(Kind::Remote) on transport,
/// credential or protocol failure.
class RemoteClassifier {
   public:
    virtual ~RemoteClassifier() = default;
    virtual std::string complete(std::string const& prompt) = 0;
};

struct RemoteOptions {
    std::size_t char_budget = 12000;
    double confidence = 0.5;
};

inline std::string truncate_codepoints(std::string_view text, std::size_t budget)
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size();) {
        if (count == budget) {
            return std::string(text.substr(0, i));
        }
        i += ::ris::detail::decode_one(text, i).length;
        ++count;
    }
    return std::string(text);
}

inline std::string build_classification_prompt(Publication const& pub, Taxonomy const& tax, RemoteOptions const& opts)
{
    std::string prompt =
        "Classify the field of research of the following publication. "
        "Answer with a JSON array of at most three labels, chosen only from this list:\n";
    for (auto const& e : tax.entries()) {
        prompt += "- " + e.label + "\n";
    }
    prompt += "\nTitle: " + pub.title + "\n\nText:\n";
    prompt += truncate_codepoints(pub.body_text, opts.char_budget);
    return prompt;
}

/// Accepts a JSON array of strings, or one label per line with optional
/// bullet/number prefixes.
inline std::vector<std::string> parse_label_list(std::string_view content)
{
    std::vector<std::string> out;
    const auto trimmed = ::ris::detail::trim(content);
    const auto lb = trimmed.find('[');
    const auto rb = trimmed.rfind(']');
    if (lb != std::string_view::npos && rb != std::string_view::npos && rb > lb) {
        try {
            const auto arr = json::parse(trimmed.substr(lb, rb - lb + 1));
            if (arr.is_array()) {
                for (auto const& v : arr) {
                    if (v.is_string()) {
                        out.push_back(v.get<std::string>());
                    }
                }
                return out;
            }
        } catch (json::parse_error const&) {
            // fall through to line mode
        }
    }
    std::size_t start = 0;
    while (start < trimmed.size()) {
        auto end = trimmed.find('\n', start);
        if (end == std::string_view::npos) {
            end = trimmed.size();
        }
        auto line = ::ris::detail::trim(trimmed.substr(start, end - start));
        start = end + 1;
        while (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == ' ' ||
                                 (line.front() >= '0' && line.front() <= '9') || line.front() == '.' ||
                                 line.front() == ')')) {
            line.remove_prefix(1);
        }
        line = ::ris::detail::trim(line);
        if (line.size() >= 2 && line.front() == '"' && line.back() == '"') {
            line = line.substr(1, line.size() - 2);
        }
        if (!line.empty()) {
            out.emplace_back(line);
        }
    }
    return out;
}

struct RemoteClassification {
    std::vector<AreaAssignment> assignments;
    std::vector<std::string> warnings;
};

/// Labels returned by the remote model are kept only when they name a
/// taxonomy entry; anything else is dropped with a warning.
inline RemoteClassification classify_remote(Publication const& pub, Taxonomy const& tax, RemoteClassifier& client,
                                            RemoteOptions const& opts = {})
{
    if (tax.empty()) {
        throw Error(Error::Kind::InvalidInput, "cannot classify against an empty taxonomy");
    }
    const auto content = client.complete(build_classification_prompt(pub, tax, opts));
    RemoteClassification out;
    std::set<std::string> seen;
    for (auto const& label : parse_label_list(content)) {
        if (auto canonical = tax.canonical(label)) {
            if (seen.insert(*canonical).second) {
                out.assignments.push_back({*canonical, AreaSource::DocumentClassifier, opts.confidence});
            }
        } else {
            out.warnings.push_back("dropped off-taxonomy label '" + label + "' for " + pub.id.value);
        }
    }
    return out;
}

struct ClassificationOutcome {
    std::vector<AreaAssignment> assignments;
    std::vector<std::string> warnings;
    bool used_fallback = false;
};

inline ClassificationOutcome classify_with_fallback(Publication const& pub, Taxonomy const& tax,
                                                    ClassifierConfig const& cfg, RemoteClassifier* client,
                                                    RemoteOptions const& opts = {})
{
    ClassificationOutcome out;
    if (client != nullptr) {
        try {
            auto remote = classify_remote(pub, tax, *client, opts);
            out.assignments = std::move(remote.assignments);
            out.warnings = std::move(remote.warnings);
            return out;
        } catch (Error const& e) {
            if (e.kind() != Error::Kind::Remote) {
                throw;
            }
            out.warnings.push_back("remote classifier failed for " + pub.id.value + ": " + e.what() +
                                   "; using keyword classifier");
            out.used_fallback = true;
        }
    }
    out.assignments = classify_document(pub, tax, cfg);
    return out;
}

// ---------------------------------------------------------------------------
// Merging provenance sources

/// Union of the three sources keyed by normalized label. Each (label, source)
/// pair appears once; manual sources carry confidence 1.0 and the classifier
/// entry keeps its highest confidence. Output is ordered by normalized label,
/// then by source.
inline std::vector<AreaAssignment> merge_areas(std::vector<std::string> const& website,
                                               std::vector<std::string> const& scholar,
                                               std::vector<AreaAssignment> const& classified)
{
    struct Group {
        std::optional<std::string> manual_display;
        std::set<std::string> other_displays;
        bool website = false;
        bool scholar = false;
        std::optional<double> classifier;
    };
    std::map<std::string, Group> groups;

    auto add_manual = [&](std::string const& label, bool is_website) {
        const auto key = normalize_label(label);
        if (key.empty()) {
            return;
        }
        auto& g = groups[key];
        if (!g.manual_display) {
            g.manual_display = std::string(::ris::detail::trim(label));
        }
        (is_website ? g.website : g.scholar) = true;
    };
    for (auto const& l : website) {
        add_manual(l, true);
    }
    for (auto const& l : scholar) {
        add_manual(l, false);
    }
    for (auto const& a : classified) {
        const auto key = normalize_label(a.label);
        if (key.empty()) {
            continue;
        }
        auto& g = groups[key];
        g.other_displays.insert(std::string(::ris::detail::trim(a.label)));
        switch (a.source) {
            case AreaSource::InstitutionWebsite:
                g.website = true;
                break;
            case AreaSource::ScholarProfile:
                g.scholar = true;
                break;
            case AreaSource::DocumentClassifier:
                g.classifier = std::max(g.classifier.value_or(0.0), a.confidence);
                break;
        }
    }

    std::vector<AreaAssignment> out;
    for (auto const& [key, g] : groups) {
        const std::string display = g.manual_display ? *g.manual_display : *g.other_displays.begin();
        if (g.website) {
            out.push_back({display, AreaSource::InstitutionWebsite, 1.0});
        }
        if (g.scholar) {
            out.push_back({display, AreaSource::ScholarProfile, 1.0});
        }
        if (g.classifier) {
            out.push_back({display, AreaSource::DocumentClassifier, *g.classifier});
        }
    }
    return out;
}

/// Number of the researcher's publications carrying each classifier label.
inline std::map<std::string, std::size_t> area_paper_counts(Researcher const& researcher,
                                                            ingestion::CorpusStore const& store)
{
    std::map<std::string, std::size_t> counts;
    for (auto const& pid : researcher.publication_ids) {
        auto const* pub = store.publication(pid);
        if (pub == nullptr) {
            continue;
        }
        std::set<std::string> labels;
        for (auto const& a : pub->area_assignments) {
            if (a.source == AreaSource::DocumentClassifier) {
                labels.insert(normalize_label(a.label));
            }
        }
        for (auto const& l : labels) {
            ++counts[l];
        }
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Whole-corpus pass

/// Recomputes every researcher's areas from the website list, the matched
/// profile and the classifier labels of their publications.
inline void remerge_researcher_areas(ingestion::CorpusStore& store)
{
    for (auto& [rid, r] : store.researchers()) {
        std::vector<AreaAssignment> classified;
        for (auto const& pid : r.publication_ids) {
            if (auto const* p = store.publication(pid)) {
                classified.insert(classified.end(), p->area_assignments.begin(), p->area_assignments.end());
            }
        }
        const std::vector<std::string> scholar = r.profile ? r.profile->stated_areas : std::vector<std::string>{};
        r.areas = merge_areas(r.stub.website_areas, scholar, classified);
    }
}

struct CorpusClassificationReport {
    std::size_t publications_classified = 0;
    std::size_t publications_labeled = 0;
    std::size_t remote_fallbacks = 0;
    std::vector<std::string> warnings;
};

/// Classifies every publication, then recomputes each researcher's merged
/// areas. With a remote client, at most `max_in_flight` calls run at once.
inline CorpusClassificationReport classify_corpus(ingestion::CorpusStore& store, Taxonomy const& tax,
                                                  ClassifierConfig const& cfg, RemoteClassifier* client = nullptr,
                                                  RemoteOptions const& opts = {}, std::size_t max_in_flight = 2)
{
    if (tax.empty()) {
        throw Error(Error::Kind::InvalidInput, "cannot classify against an empty taxonomy");
    }
    std::vector<Publication*> pubs;
    for (auto& [id, p] : store.publications()) {
        pubs.push_back(&p);
    }
    std::vector<ClassificationOutcome> outcomes(pubs.size());
    const std::size_t workers = client ? std::max<std::size_t>(1, std::min(max_in_flight, pubs.size())) : 1;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < pubs.size(); i = next++) {
            outcomes[i] = classify_with_fallback(*pubs[i], tax, cfg, client, opts);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    CorpusClassificationReport report;
    for (std::size_t i = 0; i < pubs.size(); ++i) {
        pubs[i]->area_assignments = std::move(outcomes[i].assignments);
        ++report.publications_classified;
        if (!pubs[i]->area_assignments.empty()) {
            ++report.publications_labeled;
        }
        if (outcomes[i].used_fallback) {
            ++report.remote_fallbacks;
        }
        for (auto& w : outcomes[i].warnings) {
            report.warnings.push_back(std::move(w));
        }
    }

    remerge_researcher_areas(store);
    return report;
}

}  // namespace ris::classifier
