#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ris;
using ris::test::name_rules;

TEST(NormalizePersonName, StripsTitlesAndTrims)
{
    EXPECT_EQ(normalize_person_name("Prof. Dr. Ada Lovelace ", name_rules()), "ada lovelace");
}

TEST(NormalizePersonName, FoldsGermanDiacritics)
{
    EXPECT_EQ(normalize_person_name("Jörg Müller", name_rules()), "joerg mueller");
    EXPECT_EQ(normalize_person_name("Gerhard Straße", name_rules()), "gerhard strasse");
    EXPECT_EQ(normalize_person_name("ÖZLEM ÄRZTIN", name_rules()), "oezlem aerztin");
}

TEST(NormalizePersonName, CollapsesCaseAndWhitespace)
{
    EXPECT_EQ(normalize_person_name("GAUTAM  KISHORE   SHAHI", name_rules()), "gautam kishore shahi");
}

TEST(NormalizePersonName, RemovesIngSuffixTitles)
{
    EXPECT_EQ(normalize_person_name("Prof. Dr.-Ing. Karl Weiss", name_rules()), "karl weiss");
    EXPECT_EQ(normalize_person_name("Dipl.-Inf. Anna Roth", name_rules()), "anna roth");
}

TEST(NormalizePersonName, RejectsEmptyInput)
{
    EXPECT_THROW(normalize_person_name("", name_rules()), Error);
    EXPECT_THROW(normalize_person_name("   ", name_rules()), Error);
    EXPECT_THROW(normalize_person_name("Prof. Dr.", name_rules()), Error);
}

TEST(NormalizePersonName, IsIdempotent)
{
    std::mt19937_64 rng(7);
    const std::vector<std::string> parts = {"Prof.", "Dr.", "Jörg", "MÜLLER", "ada", "  ", "Dr.-Ing.", "Weiß",
                                            "von", "Ünal", "\t", "Lovelace", "PhD", "Zoë", "Ćosić"};
    std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
    for (int i = 0; i < 500; ++i) {
        std::string raw = "Name";
        for (int k = 0; k < 5; ++k) {
            raw += " " + parts[pick(rng)];
        }
        const auto once = normalize_person_name(raw, name_rules());
        EXPECT_EQ(normalize_person_name(once, name_rules()), once) << raw;
    }
}

TEST(DedupKey, NormalizesTitleAndYear)
{
    EXPECT_EQ(dedup_key("Big Data: A Survey!", 2019), "big data a survey|2019");
    EXPECT_EQ(dedup_key("big  data: a survey", 2019), "big data a survey|2019");
    EXPECT_EQ(dedup_key("Untitled", std::nullopt), "untitled|?");
}

TEST(DedupKey, RejectsEmptyTitle)
{
    EXPECT_THROW(dedup_key("", 2020), Error);
    EXPECT_THROW(dedup_key(" !? ", 2020), Error);
}

TEST(DedupKey, InvariantUnderCasePunctuationAndWhitespace)
{
    std::mt19937_64 rng(11);
    const std::string title = "Deep learning for image segmentation in microscopy";
    const std::string punct = ".,;:!?\"'()[]";
    std::uniform_int_distribution<int> coin(0, 3);
    std::uniform_int_distribution<std::size_t> pp(0, punct.size() - 1);
    const auto expected = dedup_key(title, 2021);
    for (int i = 0; i < 300; ++i) {
        std::string variant;
        for (char c : title) {
            if (c == ' ') {
                variant += std::string(1 + coin(rng), coin(rng) == 0 ? '\t' : ' ');
                if (coin(rng) == 0) {
                    variant.push_back(punct[pp(rng)]);
                    variant.push_back(' ');
                }
                continue;
            }
            variant.push_back(coin(rng) == 0 ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
        }
        variant = std::string(coin(rng), ' ') + variant + punct[pp(rng)];
        EXPECT_EQ(dedup_key(variant, 2021), expected) << variant;
    }
}

TEST(PublicationId, EqualKeysGiveEqualIds)
{
    EXPECT_EQ(publication_id_for("Big Data: A Survey!", 2019), publication_id_for("big data a survey", 2019));
    EXPECT_NE(publication_id_for("Big Data: A Survey!", 2019), publication_id_for("Big Data: A Survey!", 2020));
    const auto id = publication_id_for("x y", std::nullopt);
    EXPECT_EQ(id.value.size(), 18u);
    EXPECT_EQ(id.value.substr(0, 2), "p-");
}

TEST(ResearcherId, RosterOrderFormat)
{
    EXPECT_EQ(researcher_id_for_index(1).value, "r-0001");
    EXPECT_EQ(researcher_id_for_index(188).value, "r-0188");
    EXPECT_LT(researcher_id_for_index(9), researcher_id_for_index(10));
}

TEST(NormalizeLabel, LowercasesAndCollapses)
{
    EXPECT_EQ(normalize_label("  Big   DATA "), "big data");
    EXPECT_EQ(normalize_label("Künstliche Intelligenz"), "künstliche intelligenz");
}

TEST(LangCode, RoundTrips)
{
    for (auto l : {LangCode::en, LangCode::de, LangCode::und}) {
        EXPECT_EQ(lang_from_string(to_string(l)), l);
    }
    EXPECT_THROW(lang_from_string("fr"), Error);
}

TEST(AreaSource, RoundTrips)
{
    for (auto s : {AreaSource::InstitutionWebsite, AreaSource::ScholarProfile, AreaSource::DocumentClassifier}) {
        EXPECT_EQ(area_source_from_string(to_string(s)), s);
    }
    EXPECT_THROW(area_source_from_string("Rumour"), Error);
}

TEST(Json, ResearcherAndPublicationRoundTrip)
{
    Researcher r;
    r.id = ResearcherId{"r-0042"};
    r.stub = {"Ada Lovelace", "CS", "ada@example.org", "+49 1", "Example U", {"Big Data"}};
    ScholarProfileRecord prof;
    prof.display_name = "Ada Lovelace";
    prof.citation_counts_by_year = {{2019, 3}, {2020, 5}};
    prof.publication_refs = {{"Notes", 1843}};
    prof.profile_url = "https://scholar.example/ada";
    r.profile = prof;
    r.match_score = 0.9;
    r.areas = {{"Big Data", AreaSource::InstitutionWebsite, 1.0}};
    r.publication_ids = {PublicationId{"p-1"}};
    EXPECT_EQ(json(r).get<Researcher>(), r);

    Publication p;
    p.id = PublicationId{"p-1"};
    p.title = "Notes";
    p.year = 1843;
    p.language = LangCode::en;
    p.owners = {r.id};
    p.area_assignments = {{"Computer Science", AreaSource::DocumentClassifier, 0.5}};
    EXPECT_EQ(json(p).get<Publication>(), p);
}

TEST(FoldText, UsesDiacriticTable)
{
    EXPECT_EQ(fold_text("Hochschule Rheinfeld – Fachbereich Äußeres", name_rules()).find("aeusseres") !=
                  std::string::npos,
              true);
}
