#pragma once

#include <string>

#include "ris/api_service.hpp"
#include "support.hpp"

namespace ris::test {

/// Service over the in-memory fixture corpus with the bundled definitions.
inline std::unique_ptr<api::Service> fixture_service(std::shared_ptr<api::DefinitionProvider> defs = nullptr,
                                                     api::Clock clock = api::system_clock())
{
    api::ServiceConfig cfg;
    cfg.definition_fixture_path = fixture_dir() / "definitions.json";
    cfg.positive_list_path = fixture_dir() / "positive_list.json";
    if (!defs) {
        defs = api::make_definition_chain(cfg);
    }
    auto svc = std::make_unique<api::Service>(cfg, stopwords(), std::move(defs), std::move(clock));
    auto st = std::make_shared<api::ServiceState>();
    st->snapshot = fixture_snapshot();
    st->corpus = fixture_store();
    st->positive_list = json::parse(read_file(cfg.positive_list_path)).get<std::vector<std::string>>();
    svc->publish(std::move(st));
    return svc;
}

// Structural checks of the endpoint bodies. Each returns an empty string when
// the document conforms, otherwise the first violation.

namespace schema {

inline std::string require(json const& j, std::string const& key, json::value_t type, std::string const& where)
{
    if (!j.is_object() || !j.contains(key)) {
        return where + ": missing '" + key + "'";
    }
    const auto t = j.at(key).type();
    const bool numeric = type == json::value_t::number_float &&
                         (t == json::value_t::number_integer || t == json::value_t::number_unsigned);
    const bool unsigned_ok = type == json::value_t::number_unsigned && t == json::value_t::number_integer &&
                             j.at(key).get<std::int64_t>() >= 0;
    if (t != type && !numeric && !unsigned_ok) {
        return where + ": '" + key + "' has type " + j.at(key).type_name();
    }
    return {};
}

#define RIS_SCHEMA_CHECK(expr)        \
    do {                              \
        if (auto e_ = (expr); !e_.empty()) { \
            return e_;                \
        }                             \
    } while (0)

inline std::string error_body(json const& j)
{
    RIS_SCHEMA_CHECK(require(j, "error", json::value_t::string, "error"));
    return j.size() == 1 ? std::string() : "error: unexpected members";
}

inline std::string search(json const& j)
{
    using V = json::value_t;
    RIS_SCHEMA_CHECK(require(j, "query", V::string, "search"));
    RIS_SCHEMA_CHECK(require(j, "experts", V::array, "search"));
    RIS_SCHEMA_CHECK(require(j, "documents", V::array, "search"));
    for (auto const& e : j["experts"]) {
        RIS_SCHEMA_CHECK(require(e, "researcher", V::string, "expert"));
        RIS_SCHEMA_CHECK(require(e, "name", V::string, "expert"));
        RIS_SCHEMA_CHECK(require(e, "department", V::string, "expert"));
        RIS_SCHEMA_CHECK(require(e, "score", V::number_float, "expert"));
        RIS_SCHEMA_CHECK(require(e, "matched_areas", V::array, "expert"));
        RIS_SCHEMA_CHECK(require(e, "top_documents", V::array, "expert"));
        RIS_SCHEMA_CHECK(require(e, "explanation", V::string, "expert"));
        for (auto const& d : e["top_documents"]) {
            RIS_SCHEMA_CHECK(require(d, "id", V::string, "top_document"));
            RIS_SCHEMA_CHECK(require(d, "score", V::number_float, "top_document"));
        }
    }
    for (auto const& d : j["documents"]) {
        RIS_SCHEMA_CHECK(require(d, "id", V::string, "document"));
        RIS_SCHEMA_CHECK(require(d, "title", V::string, "document"));
        RIS_SCHEMA_CHECK(require(d, "score", V::number_float, "document"));
    }
    return {};
}

inline std::string expert(json const& j)
{
    using V = json::value_t;
    for (auto const* k : {"id", "name", "department", "email", "institution"}) {
        RIS_SCHEMA_CHECK(require(j, k, V::string, "profile"));
    }
    RIS_SCHEMA_CHECK(require(j, "profile_matched", V::boolean, "profile"));
    RIS_SCHEMA_CHECK(require(j, "needs_review", V::boolean, "profile"));
    if (j.contains("phone")) {
        return "profile: exposes phone";
    }
    for (auto const* k : {"areas", "publications", "citations", "external_links"}) {
        RIS_SCHEMA_CHECK(require(j, k, V::array, "profile"));
    }
    for (auto const& a : j["areas"]) {
        RIS_SCHEMA_CHECK(require(a, "label", V::string, "area"));
        RIS_SCHEMA_CHECK(require(a, "normalized", V::string, "area"));
        RIS_SCHEMA_CHECK(require(a, "sources", V::array, "area"));
        RIS_SCHEMA_CHECK(require(a, "paper_count", V::number_unsigned, "area"));
        if (!a.contains("classifier_confidence") ||
            !(a["classifier_confidence"].is_null() || a["classifier_confidence"].is_number())) {
            return "area: bad classifier_confidence";
        }
    }
    for (auto const& p : j["publications"]) {
        RIS_SCHEMA_CHECK(require(p, "id", V::string, "publication"));
        RIS_SCHEMA_CHECK(require(p, "title", V::string, "publication"));
        RIS_SCHEMA_CHECK(require(p, "authors", V::array, "publication"));
        RIS_SCHEMA_CHECK(require(p, "language", V::string, "publication"));
        RIS_SCHEMA_CHECK(require(p, "areas", V::array, "publication"));
    }
    for (auto const& c : j["citations"]) {
        RIS_SCHEMA_CHECK(require(c, "year", V::number_unsigned, "citation"));
        RIS_SCHEMA_CHECK(require(c, "count", V::number_unsigned, "citation"));
    }
    for (auto const& l : j["external_links"]) {
        RIS_SCHEMA_CHECK(require(l, "kind", V::string, "link"));
        RIS_SCHEMA_CHECK(require(l, "url", V::string, "link"));
    }
    return {};
}

inline std::string fields(json const& j)
{
    using V = json::value_t;
    if (!j.is_array()) {
        return "fields: not an array";
    }
    for (auto const& r : j) {
        RIS_SCHEMA_CHECK(require(r, "label", V::string, "field"));
        RIS_SCHEMA_CHECK(require(r, "normalized", V::string, "field"));
        RIS_SCHEMA_CHECK(require(r, "researcher_count", V::number_unsigned, "field"));
        RIS_SCHEMA_CHECK(require(r, "publication_count", V::number_unsigned, "field"));
    }
    return {};
}

inline std::string wordcloud(json const& j)
{
    using V = json::value_t;
    if (!j.is_array()) {
        return "wordcloud: not an array";
    }
    for (auto const& r : j) {
        RIS_SCHEMA_CHECK(require(r, "text", V::string, "cloud item"));
        RIS_SCHEMA_CHECK(require(r, "weight", V::number_unsigned, "cloud item"));
    }
    return {};
}

inline std::string definition(json const& j)
{
    using V = json::value_t;
    RIS_SCHEMA_CHECK(require(j, "term", V::string, "definition"));
    RIS_SCHEMA_CHECK(require(j, "found", V::boolean, "definition"));
    RIS_SCHEMA_CHECK(require(j, "summary", V::string, "definition"));
    RIS_SCHEMA_CHECK(require(j, "source_url", V::string, "definition"));
    RIS_SCHEMA_CHECK(require(j, "fetched_at", V::string, "definition"));
    return {};
}

inline std::string healthz(json const& j)
{
    using V = json::value_t;
    RIS_SCHEMA_CHECK(require(j, "status", V::string, "healthz"));
    if (j["status"] == "ok") {
        RIS_SCHEMA_CHECK(require(j, "snapshot_build_timestamp", V::number_unsigned, "healthz"));
        RIS_SCHEMA_CHECK(require(j, "doc_count", V::number_unsigned, "healthz"));
        RIS_SCHEMA_CHECK(require(j, "researcher_count", V::number_unsigned, "healthz"));
    }
    return {};
}

#undef RIS_SCHEMA_CHECK

}  // namespace schema

}  // namespace ris::test
