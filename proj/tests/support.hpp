#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "ris/classifier.hpp"
#include "ris/corpus_model.hpp"
#include "ris/docproc.hpp"
#include "ris/index.hpp"
#include "ris/ingestion.hpp"

namespace ris::test {

namespace fs = std::filesystem;

inline fs::path resource_dir() { return RIS_RESOURCE_DIR; }
inline fs::path fixture_dir() { return RIS_FIXTURE_DIR; }
inline fs::path golden_dir() { return RIS_GOLDEN_DIR; }
inline fs::path cli_path() { return RIS_CLI_PATH; }

inline json golden(std::string const& name) { return json::parse(read_file(golden_dir() / (name + ".json"))); }

inline NameRules const& name_rules()
{
    static const NameRules rules = NameRules::load(resource_dir() / "name_rules.json");
    return rules;
}

inline docproc::Stopwords const& stopwords()
{
    static const docproc::Stopwords s = docproc::Stopwords::load(resource_dir());
    return s;
}

inline classifier::Taxonomy const& taxonomy()
{
    static const classifier::Taxonomy t = classifier::Taxonomy::load(resource_dir() / "taxonomy.json");
    return t;
}

/// Fixture corpus after roster, profiles, publications and classification.
inline ingestion::CorpusStore const& fixture_store()
{
    static const ingestion::CorpusStore store = [] {
        const auto parsed = ingestion::parse_roster(read_file(fixture_dir() / "roster.csv"),
                                                    ingestion::RosterFormat::csv, name_rules());
        auto fetcher = ingestion::FixtureProfileFetcher::load(fixture_dir() / "profiles.json", name_rules());
        const auto outcomes = ingestion::fetch_profiles(parsed.stubs, fetcher);
        const auto assembled =
            ingestion::assemble_researchers(parsed.stubs, outcomes, ingestion::MatchConfig{}, name_rules());
        ingestion::CorpusStore s;
        for (auto const& r : assembled.researchers) {
            s.put_researcher(r);
        }
        const auto recs = ingestion::parse_publication_records(read_file(fixture_dir() / "publications.jsonl"));
        ingestion::ingest_publications(recs.records, s, stopwords());
        classifier::classify_corpus(s, taxonomy(), classifier::ClassifierConfig{});
        return s;
    }();
    return store;
}

inline index::IndexSnapshot const& fixture_snapshot()
{
    static const index::IndexSnapshot snap = index::build_index(fixture_store());
    return snap;
}

/// Scratch directory removed on destruction.
class TempDir {
   public:
    TempDir()
    {
        std::string tmpl = (fs::temp_directory_path() / "ris-test-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        m_path = tmpl;
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(m_path, ec);
    }
    TempDir(TempDir const&) = delete;
    TempDir& operator=(TempDir const&) = delete;

    [[nodiscard]] fs::path const& path() const noexcept { return m_path; }

   private:
    fs::path m_path;
};

struct ShellResult {
    int status = -1;
    std::string out;
};

/// Runs a shell command and captures its stdout.
inline ShellResult run_shell(std::string const& command)
{
    ShellResult r;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        r.out.append(buf, n);
    }
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

inline std::string quote(fs::path const& p) { return "'" + p.string() + "'"; }

/// Runs the whole fixture pipeline through the CLI binary into `data`.
/// Returns the concatenated stdout of every stage and the final status.
inline ShellResult cli_pipeline(fs::path const& data)
{
    const std::string base = quote(cli_path()) + " --data-dir " + quote(data) + " --resources " +
                             quote(resource_dir()) + " ";
    const std::vector<std::string> stages = {
        "ingest-roster " + quote(fixture_dir() / "roster.csv") + " --profiles " + quote(fixture_dir() / "profiles.json"),
        "ingest-pubs " + quote(fixture_dir() / "publications.jsonl"),
        "classify",
        "build-index --timestamp 1700000000",
        "stats",
    };
    ShellResult all{0, {}};
    for (auto const& s : stages) {
        const auto r = run_shell(base + s + " 2>/dev/null");
        all.out += r.out;
        if (r.status != 0) {
            all.status = r.status;
            return all;
        }
    }
    return all;
}

// ---------------------------------------------------------------------------
// Generators and independent oracles

/// Email/URL matcher written independently of docproc.
inline const std::regex& pii_pattern()
{
    static const std::regex re(R"((?:https?://|www\.)\S*|[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})",
                               std::regex::ECMAScript | std::regex::icase);
    return re;
}

inline std::string fuzz_text(std::mt19937_64& rng)
{
    static const std::vector<std::string> atoms = {
        "the",       "data",        "Analyse",    "über",       "a@b.de",     "x.y@uni-rheinfeld.de",
        "http://",   "https://x.y", "www.",       "WWW.Example.ORG/p?q=1",    "HTTPS://A.B/c",
        "@",         "user@",       "@host.com",  "a@b",        "a@b.c",      "mail:bob@ex.io,",
        ".",         ",",           "-",          "References", "REFERENCES:", "Literatur",
        "\n",        "\n\n",        "  ",         "\t",         "[1]",        "doi:10.1000/xyz",
        "Zoë",       "naïve",       "e-mail",     "foo.bar@",   "q@q.qq.",    "hTtP://z",
        "(see",      "www.x)",      "first.last+tag@sub.domain.co.uk", "%", "_", "+"};
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
    std::uniform_int_distribution<int> len(0, 60);
    std::uniform_int_distribution<int> sep(0, 4);
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        s += atoms[pick(rng)];
        const int k = sep(rng);
        if (k == 0) {
            s += "\n";
        } else if (k < 3) {
            s += " ";
        }
    }
    return s;
}

// Brute-force enumeration: every researcher, every distinct label, every
// adjacent token pair, recounted from strings.
inline std::map<std::string, std::set<std::string>> enumerate_cloud(index::IndexSnapshot const& snap,
                                                                    std::optional<std::set<std::string>> allowed)
{
    std::map<std::string, std::set<std::string>> out;
    for (auto const& [rid, areas] : snap.researcher_areas) {
        std::set<std::string> labels;
        for (auto const& a : areas) {
            labels.insert(normalize_label(a.label));
        }
        for (auto const& label : labels) {
            if (allowed && allowed->count(label) == 0) {
                continue;
            }
            const auto toks = docproc::token_texts(label);
            if (toks.size() == 1) {
                out[toks[0]].insert(rid.value);
                continue;
            }
            auto const& stop = stopwords().for_language(docproc::detect_language(label, stopwords()));
            bool any = false;
            for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
                if (stop.count(toks[i]) || stop.count(toks[i + 1])) {
                    continue;
                }
                out[toks[i] + " " + toks[i + 1]].insert(rid.value);
                any = true;
            }
            if (!any && !toks.empty()) {
                out[label].insert(rid.value);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Naive reference scorer: recounts everything from raw token lists.

struct NaiveDoc {
    std::string id;
    std::vector<std::string> title, body, areas;
};

inline double naive_bm25(double tf, double df, double n, double len, double avg)
{
    const double k1 = 1.2;
    const double b = 0.75;
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
}

inline std::vector<std::pair<std::string, double>> naive_search(std::vector<std::string> query,
                                                                std::vector<NaiveDoc> const& docs)
{
    std::sort(query.begin(), query.end());
    query.erase(std::unique(query.begin(), query.end()), query.end());
    const double n = static_cast<double>(docs.size());
    auto field = [](NaiveDoc const& d, int f) -> std::vector<std::string> const& {
        return f == 0 ? d.title : (f == 1 ? d.areas : d.body);
    };
    const double weights[3] = {2.5, 3.0, 1.0};
    double avg[3] = {0, 0, 0};
    for (int f = 0; f < 3; ++f) {
        for (auto const& d : docs) {
            avg[f] += static_cast<double>(field(d, f).size());
        }
        avg[f] /= n;
    }
    std::vector<std::pair<std::string, double>> out;
    for (auto const& d : docs) {
        double s = 0.0;
        for (auto const& t : query) {
            for (int f = 0; f < 3; ++f) {
                const auto tf = std::count(field(d, f).begin(), field(d, f).end(), t);
                if (tf == 0) {
                    continue;
                }
                double df = 0;
                for (auto const& o : docs) {
                    df += std::count(field(o, f).begin(), field(o, f).end(), t) > 0 ? 1 : 0;
                }
                s += weights[f] * naive_bm25(static_cast<double>(tf), df, n,
                                             static_cast<double>(field(d, f).size()), avg[f]);
            }
        }
        if (s > 0) {
            out.emplace_back(d.id, s);
        }
    }
    std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return out;
}

/// Random corpus over a small vocabulary, returned both as a store (with
/// classifier labels drawn from the vocabulary) and as naive token lists.
struct GeneratedCorpus {
    ingestion::CorpusStore store;
    std::vector<NaiveDoc> docs;
    std::vector<std::string> vocabulary;
};

inline GeneratedCorpus generate_corpus(std::mt19937_64& rng, std::size_t max_docs = 100, std::size_t max_terms = 30)
{
    GeneratedCorpus g;
    const std::size_t n_terms = std::uniform_int_distribution<std::size_t>(1, max_terms)(rng);
    for (std::size_t i = 0; i < n_terms; ++i) {
        g.vocabulary.push_back("t" + std::to_string(i) + (i % 3 == 0 ? "x" : "q"));
    }
    const std::size_t n_docs = std::uniform_int_distribution<std::size_t>(1, max_docs)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, n_terms - 1);
    // A skewed length distribution so some fields are empty.
    std::uniform_int_distribution<int> title_len(0, 6), body_len(0, 40), area_len(0, 3);

    Researcher owner;
    owner.id = ResearcherId{"r-0001"};
    owner.stub.full_name = "Generated Owner";
    g.store.put_researcher(owner);

    for (std::size_t d = 0; d < n_docs; ++d) {
        auto words = [&](int len) {
            std::vector<std::string> w;
            for (int i = 0; i < len; ++i) {
                w.push_back(g.vocabulary[pick(rng)]);
            }
            return w;
        };
        NaiveDoc nd;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "p-%04zu", d);
        nd.id = idbuf;
        nd.title = words(title_len(rng));
        if (nd.title.empty()) {
            nd.title.push_back(g.vocabulary[pick(rng)]);
        }
        nd.body = words(body_len(rng));
        nd.areas = words(area_len(rng));

        auto join = [](std::vector<std::string> const& w) {
            std::string s;
            for (auto const& x : w) {
                s += (s.empty() ? "" : " ") + x;
            }
            return s;
        };
        Publication p;
        p.id = PublicationId{nd.id};
        p.title = join(nd.title);
        p.body_text = join(nd.body);
        for (auto const& a : nd.areas) {
            p.area_assignments.push_back({a, AreaSource::DocumentClassifier, 0.5});
        }
        p.owners = {owner.id};
        g.store.put_publication(std::move(p));
        g.docs.push_back(std::move(nd));
    }
    g.store.relink();
    return g;
}

}  // namespace ris::test
