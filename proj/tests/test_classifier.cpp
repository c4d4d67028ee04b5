#include <gtest/gtest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "ris/remote_classifier.hpp"
#include "support.hpp"

using namespace ris;
using namespace ris::classifier;
using ris::test::fixture_store;
using ris::test::taxonomy;

namespace {

Publication doc(std::string title, std::string body = {})
{
    Publication p;
    p.id = PublicationId{"p-test"};
    p.title = std::move(title);
    p.body_text = std::move(body);
    return p;
}

std::string repeat(std::string const& s, int n)
{
    std::string out;
    for (int i = 0; i < n; ++i) {
        out += s + " filler ";
    }
    return out;
}

class ScriptedClient final : public RemoteClassifier {
   public:
    explicit ScriptedClient(std::string reply, bool fail = false) : m_reply(std::move(reply)), m_fail(fail) {}
    std::string complete(std::string const& prompt) override
    {
        last_prompt = prompt;
        if (m_fail) {
            throw Error(Error::Kind::Remote, "endpoint unreachable");
        }
        return m_reply;
    }
    std::string last_prompt;

   private:
    std::string m_reply;
    bool m_fail;
};

using Provenance = std::map<std::string, std::set<std::string>>;

Provenance provenance(std::vector<AreaAssignment> const& areas)
{
    Provenance out;
    for (auto const& a : areas) {
        out[normalize_label(a.label)].insert(std::string(to_string(a.source)));
    }
    return out;
}

std::vector<AreaAssignment> classified(std::initializer_list<const char*> labels, double c = 0.5)
{
    std::vector<AreaAssignment> out;
    for (auto const* l : labels) {
        out.push_back({l, AreaSource::DocumentClassifier, c});
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Taxonomy

TEST(Taxonomy, BundledFileLoads)
{
    EXPECT_EQ(taxonomy().entries().size(), 25u);
    EXPECT_EQ(taxonomy().canonical("  big   DATA "), "Big Data");
    EXPECT_FALSE(taxonomy().canonical("Web Mining"));
}

TEST(Taxonomy, RejectsInvalidEntries)
{
    EXPECT_THROW(Taxonomy::from_json(json::parse(R"([{"label":"A","keywords":["x"]},{"label":" a ","keywords":["y"]}])")),
                 Error);
    EXPECT_THROW(Taxonomy::from_json(json::parse(R"([{"label":"A","keywords":[""]}])")), Error);
    EXPECT_THROW(Taxonomy::from_json(json::parse(R"([{"label":"A","keywords":["one two three four"]}])")), Error);
    EXPECT_THROW(Taxonomy::from_json(json::parse(R"([{"label":"A","keywords":["x"],"parent":"B"}])")), Error);
}

// ---------------------------------------------------------------------------
// Keyword classifier

TEST(ClassifyDocument, FormulaExample)
{
    const Taxonomy tax({{"Big Data", {"big data"}, std::nullopt}});
    const auto out = classify_document(doc("Big Data Stream Processing", repeat("big data", 7)), tax);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].label, "Big Data");
    EXPECT_EQ(out[0].source, AreaSource::DocumentClassifier);
    EXPECT_DOUBLE_EQ(out[0].confidence, 0.5);
}

TEST(ClassifyDocument, NoHitsIsEmpty)
{
    EXPECT_TRUE(classify_document(doc("Colour Palettes", "pleasant hues"), taxonomy()).empty());
    EXPECT_TRUE(classify_document(doc(""), taxonomy()).empty());
}

TEST(ClassifyDocument, EmptyTaxonomyIsError)
{
    EXPECT_THROW(classify_document(doc("x"), Taxonomy{}), Error);
    auto store = fixture_store();
    EXPECT_THROW(classify_corpus(store, Taxonomy{}, {}), Error);
}

TEST(ClassifyDocument, MinConfidenceAndTopK)
{
    const Taxonomy tax({{"A", {"alpha"}, std::nullopt},
                        {"B", {"beta"}, std::nullopt},
                        {"C", {"gamma"}, std::nullopt},
                        {"D", {"delta"}, std::nullopt}});
    // raw 1 -> 1/11 < 0.15, raw 2 -> 2/12 >= 0.15
    auto out = classify_document(doc("", "alpha beta beta"), tax);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].label, "B");
    out = classify_document(doc("alpha beta gamma delta"), tax);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].label, "A");
    EXPECT_EQ(out[2].label, "C");
}

TEST(ClassifyDocument, ConfidenceMonotoneAndBounded)
{
    double prev = -1.0;
    for (int raw = 0; raw < 500; ++raw) {
        const double c = keyword_confidence(raw, {});
        EXPECT_GT(c, prev);
        EXPECT_GE(c, 0.0);
        EXPECT_LT(c, 1.0);
        prev = c;
    }
}

TEST(ClassifyDocument, LabelsAreTaxonomyMembers)
{
    std::mt19937_64 rng(17);
    std::vector<std::string> words;
    for (auto const& e : taxonomy().entries()) {
        words.insert(words.end(), e.keywords.begin(), e.keywords.end());
    }
    words.insert(words.end(), {"the", "und", "data", "big", "x-ray", "learning"});
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    for (int i = 0; i < 300; ++i) {
        std::string title, body;
        for (int k = 0; k < 4; ++k) {
            title += words[pick(rng)] + " ";
        }
        for (int k = 0; k < 30; ++k) {
            body += words[pick(rng)] + " ";
        }
        const auto out = classify_document(doc(title, body), taxonomy());
        EXPECT_LE(out.size(), 3u);
        for (std::size_t k = 0; k < out.size(); ++k) {
            EXPECT_TRUE(taxonomy().canonical(out[k].label).has_value());
            EXPECT_GE(out[k].confidence, 0.15);
            if (k > 0) {
                EXPECT_GE(out[k - 1].confidence, out[k].confidence);
            }
        }
    }
}

TEST(ClassifyDocument, FixtureMatchesGolden)
{
    const auto g = ris::test::golden("classification");
    auto const& store = fixture_store();
    ASSERT_EQ(store.publications().size(), g.size());
    for (auto const& [pid, p] : store.publications()) {
        auto const& want = g.at(pid.value);
        ASSERT_EQ(p.area_assignments.size(), want.size()) << pid.value;
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_EQ(p.area_assignments[i].label, want[i]["label"].get<std::string>()) << pid.value;
            EXPECT_NEAR(p.area_assignments[i].confidence, want[i]["confidence"].get<double>(), 1e-12) << pid.value;
        }
    }
}

// ---------------------------------------------------------------------------
// Remote classifier

TEST(ClassifyRemote, DropsOffTaxonomyLabels)
{
    ScriptedClient client(R"(["Big Data", "Quantum Basket Weaving", "machine learning"])");
    const auto out = classify_remote(doc("T", "body"), taxonomy(), client);
    ASSERT_EQ(out.assignments.size(), 2u);
    EXPECT_EQ(out.assignments[0].label, "Big Data");
    EXPECT_EQ(out.assignments[1].label, "Machine Learning");
    for (auto const& a : out.assignments) {
        EXPECT_DOUBLE_EQ(a.confidence, 0.5);
        EXPECT_EQ(a.source, AreaSource::DocumentClassifier);
    }
    ASSERT_EQ(out.warnings.size(), 1u);
    EXPECT_NE(out.warnings[0].find("Quantum Basket Weaving"), std::string::npos);
}

TEST(ClassifyRemote, PromptListsTaxonomyAndTruncatesText)
{
    ScriptedClient client("[]");
    RemoteOptions opts;
    opts.char_budget = 5;
    classify_remote(doc("Title", "Überlänge text"), taxonomy(), client, opts);
    EXPECT_NE(client.last_prompt.find("- Communication Design\n"), std::string::npos);
    EXPECT_NE(client.last_prompt.find("Title: Title"), std::string::npos);
    EXPECT_EQ(client.last_prompt.substr(client.last_prompt.size() - 6), "Überl");
}

TEST(ClassifyRemote, LineListReplies)
{
    EXPECT_EQ(parse_label_list("1. Big Data\n2) \"Optimization\"\n- Marketing\n"),
              (std::vector<std::string>{"Big Data", "Optimization", "Marketing"}));
    EXPECT_EQ(parse_label_list("Sure: [\"A\", 3, \"B\"]"), (std::vector<std::string>{"A", "B"}));
}

TEST(ClassifyRemote, FallbackOnUnreachableEndpoint)
{
    ScriptedClient failing("", true);
    const auto p = doc("Big Data Stream Processing", repeat("big data", 7));
    const auto out = classify_with_fallback(p, taxonomy(), {}, &failing);
    EXPECT_TRUE(out.used_fallback);
    EXPECT_EQ(out.assignments, classify_document(p, taxonomy(), {}));
    EXPECT_EQ(out.warnings.size(), 1u);
}

TEST(ClassifyRemote, RealEndpointUnreachable)
{
    ChatEndpointConfig cfg;
    cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    cfg.api_key = "k";
    cfg.timeout = std::chrono::seconds(2);
    HttpChatClassifier client(cfg);
    const auto p = doc("Machine learning", "neural networks");
    const auto out = classify_with_fallback(p, taxonomy(), {}, &client);
    EXPECT_TRUE(out.used_fallback);
    EXPECT_EQ(out.assignments, classify_document(p, taxonomy(), {}));
}

TEST(ClassifyRemote, EnvironmentConfig)
{
    EXPECT_THROW(ChatEndpointConfig::from_environment([](const char*) -> const char* { return nullptr; }), Error);
    const auto cfg = ChatEndpointConfig::from_environment([](const char* k) -> const char* {
        const std::string key = k;
        if (key == "RIS_LLM_ENDPOINT") {
            return "http://localhost:9/v1/chat/completions";
        }
        if (key == "RIS_LLM_KEY") {
            return "secret";
        }
        return nullptr;
    });
    EXPECT_EQ(cfg.api_key, "secret");
    EXPECT_EQ(cfg.model, "gpt-4o-mini");
}

TEST(ClassifyRemote, RecordedTranscript)
{
    const auto t = json::parse(read_file(ris::test::fixture_dir() / "remote_transcript.json"));
    json seen_body;
    std::string seen_auth;
    httplib::Server server;
    server.Post(t["request"]["path"].get<std::string>(), [&](httplib::Request const& req, httplib::Response& res) {
        seen_body = json::parse(req.body);
        seen_auth = req.get_header_value("Authorization");
        res.status = t["response"]["status"].get<int>();
        res.set_content(t["response"]["body"].dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ChatEndpointConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + t["request"]["path"].get<std::string>();
    cfg.api_key = "test-key";
    HttpChatClassifier client(cfg);
    Publication p = doc(t["publication"]["title"], t["publication"]["body_text"]);
    p.id = PublicationId{t["publication"]["id"]};
    const auto out = classify_remote(p, taxonomy(), client);
    server.stop();
    th.join();

    EXPECT_EQ(seen_body, t["request"]["body"]);
    EXPECT_EQ(seen_auth, t["request"]["authorization"].get<std::string>());
    std::vector<std::string> labels;
    for (auto const& a : out.assignments) {
        labels.push_back(a.label);
        EXPECT_DOUBLE_EQ(a.confidence, t["expected"]["confidence"].get<double>());
    }
    EXPECT_EQ(labels, t["expected"]["labels"].get<std::vector<std::string>>());
    EXPECT_EQ(out.warnings.size(), t["expected"]["warnings"].get<std::size_t>());
}

TEST(ClassifyRemote, CredentialRejection)
{
    httplib::Server server;
    server.Post("/chat", [](httplib::Request const&, httplib::Response& res) { res.status = 401; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    ChatEndpointConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/chat";
    cfg.api_key = "bad";
    HttpChatClassifier client(cfg);
    try {
        client.complete("x");
        ADD_FAILURE() << "expected an error";
    } catch (Error const& e) {
        EXPECT_EQ(e.kind(), Error::Kind::Remote);
        EXPECT_NE(std::string(e.what()).find("credentials"), std::string::npos);
    }
    server.stop();
    th.join();
}

TEST(ClassifyCorpus, RemoteClientUsedForEveryPublication)
{
    auto store = fixture_store();
    ScriptedClient client(R"(["Optimization"])");
    const auto report = classify_corpus(store, taxonomy(), {}, &client);
    EXPECT_EQ(report.publications_classified, 40u);
    EXPECT_EQ(report.publications_labeled, 40u);
    EXPECT_EQ(report.remote_fallbacks, 0u);
    for (auto const& [pid, p] : store.publications()) {
        ASSERT_EQ(p.area_assignments.size(), 1u);
        EXPECT_EQ(p.area_assignments[0].label, "Optimization");
    }
}

// ---------------------------------------------------------------------------
// Merge

TEST(MergeAreas, WorkedExampleSevenLabels)
{
    const auto out = merge_areas({"Big Data", "Data Science", "Information Retrieval", "Software Engineering"},
                                 {"Big Data", "Software Engineering", "Information Retrieval"},
                                 classified({"Cognitive Neuroscience", "Software Design Patterns",
                                             "Object-Oriented Programming"}));
    const Provenance want = {
        {"big data", {"InstitutionWebsite", "ScholarProfile"}},
        {"cognitive neuroscience", {"DocumentClassifier"}},
        {"data science", {"InstitutionWebsite"}},
        {"information retrieval", {"InstitutionWebsite", "ScholarProfile"}},
        {"object-oriented programming", {"DocumentClassifier"}},
        {"software design patterns", {"DocumentClassifier"}},
        {"software engineering", {"InstitutionWebsite", "ScholarProfile"}},
    };
    EXPECT_EQ(provenance(out), want);
    EXPECT_EQ(out.size(), 10u);
    for (auto const& a : out) {
        if (a.source != AreaSource::DocumentClassifier) {
            EXPECT_EQ(a.confidence, 1.0);
        }
    }
    EXPECT_TRUE(std::is_sorted(out.begin(), out.end(), [](AreaAssignment const& a, AreaAssignment const& b) {
        return normalize_label(a.label) < normalize_label(b.label);
    }));
}

TEST(MergeAreas, EmptyInputs) { EXPECT_TRUE(merge_areas({}, {}, {}).empty()); }

TEST(MergeAreas, CaseOnlyDifferencesCollapse)
{
    const auto out = merge_areas({"Big Data"}, {"big  data"}, classified({"BIG DATA"}, 0.4));
    ASSERT_EQ(out.size(), 3u);
    for (auto const& a : out) {
        EXPECT_EQ(a.label, "Big Data");
    }
    EXPECT_EQ(provenance(out).size(), 1u);
    EXPECT_DOUBLE_EQ(out[2].confidence, 0.4);
}

TEST(MergeAreas, ClassifierKeepsHighestConfidence)
{
    const auto out = merge_areas({}, {}, {{"Optimization", AreaSource::DocumentClassifier, 0.2},
                                          {"optimization", AreaSource::DocumentClassifier, 0.6}});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_DOUBLE_EQ(out[0].confidence, 0.6);
}

TEST(MergeAreas, CommutativeAndIdempotent)
{
    std::mt19937_64 rng(23);
    const std::vector<std::string> pool = {"Big Data", "big data", "Optimization", "Marketing", "Social Work",
                                           "Machine Learning", "machine  learning", "Bioinformatics"};
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> len(0, 5);
    std::uniform_real_distribution<double> conf(0.15, 0.9);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> web, sch;
        std::vector<AreaAssignment> cls;
        for (int k = len(rng); k > 0; --k) {
            web.push_back(pool[pick(rng)]);
        }
        for (int k = len(rng); k > 0; --k) {
            sch.push_back(pool[pick(rng)]);
        }
        for (int k = len(rng); k > 0; --k) {
            cls.push_back({pool[pick(rng)], AreaSource::DocumentClassifier, conf(rng)});
        }
        const auto once = merge_areas(web, sch, cls);
        auto shuffled = cls;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(merge_areas(web, sch, shuffled), once);
        auto again_input = cls;
        again_input.insert(again_input.end(), once.begin(), once.end());
        EXPECT_EQ(merge_areas(web, sch, again_input), once);
    }
}

TEST(MergeAreas, FixtureMatchesGolden)
{
    const auto g = ris::test::golden("merged_areas");
    for (auto const& [rid, r] : fixture_store().researchers()) {
        Provenance want;
        for (auto const& [label, sources] : g.at(rid.value).items()) {
            for (auto const& s : sources) {
                want[label].insert(s.get<std::string>());
            }
        }
        EXPECT_EQ(provenance(r.areas), want) << rid.value;
    }
    EXPECT_EQ(provenance(fixture_store().researcher(ResearcherId{"r-0001"})->areas).size(), 7u);
}

// ---------------------------------------------------------------------------
// Paper counts

TEST(AreaPaperCounts, FixtureMatchesGolden)
{
    const auto g = ris::test::golden("area_paper_counts");
    auto const& store = fixture_store();
    for (auto const& [rid, r] : store.researchers()) {
        const auto counts = area_paper_counts(r, store);
        EXPECT_EQ(json(counts), g.contains(rid.value) ? g[rid.value] : json::object()) << rid.value;
    }
}

TEST(AreaPaperCounts, SingleJointPaper)
{
    ingestion::CorpusStore store;
    Researcher r;
    r.id = ResearcherId{"r-0001"};
    r.stub.full_name = "X";
    store.put_researcher(r);
    Publication p = doc("EEG");
    p.owners = {r.id};
    p.area_assignments = classified({"Cognitive Neuroscience"});
    store.put_publication(p);
    store.relink();
    EXPECT_EQ(area_paper_counts(*store.researcher(r.id), store),
              (std::map<std::string, std::size_t>{{"cognitive neuroscience", 1}}));

    Researcher empty;
    empty.id = ResearcherId{"r-0002"};
    EXPECT_TRUE(area_paper_counts(empty, store).empty());
}

TEST(AreaPaperCounts, ClassifierFindsFinerAreasThanManualSources)
{
    auto const& r = *fixture_store().researcher(ResearcherId{"r-0001"});
    std::set<std::string> manual;
    for (auto const& l : r.stub.website_areas) {
        manual.insert(normalize_label(l));
    }
    ASSERT_TRUE(r.profile);
    for (auto const& l : r.profile->stated_areas) {
        manual.insert(normalize_label(l));
    }
    std::size_t novel = 0;
    for (auto const& [label, n] : area_paper_counts(r, fixture_store())) {
        novel += manual.count(label) == 0 ? 1 : 0;
    }
    EXPECT_GE(novel, 1u);
}
