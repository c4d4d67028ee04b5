#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ris/classifier.hpp"
#include "ris/corpus_model.hpp"
#include "ris/detail/http.hpp"
#include "ris/docproc.hpp"
#include "ris/index.hpp"
#include "ris/ingestion.hpp"

namespace ris::api {

using Clock = std::function<std::chrono::system_clock::time_point()>;

inline Clock system_clock() { return [] { return std::chrono::system_clock::now(); }; }

// ---------------------------------------------------------------------------
// Configuration

struct RemoteDefinitionsConfig {
    bool enabled = false;
    std::string base_url = "https://en.wikipedia.org/api/rest_v1";
};

struct ServiceConfig {
    std::string bind_address = "127.0.0.1:8080";
    std::filesystem::path snapshot_path;
    std::filesystem::path corpus_path;  // data directory, or its corpus.jsonl
    std::filesystem::path definition_fixture_path;
    std::filesystem::path positive_list_path;  // optional
    std::filesystem::path static_dir;          // optional
    std::string cors_allowed_origin = "*";
    std::int64_t definition_cache_ttl_seconds = 86400;
    RemoteDefinitionsConfig remote_definitions;

    /// Relative paths resolve against `base_dir`.
    static ServiceConfig from_json(json const& j, std::filesystem::path const& base_dir = {})
    {
        ServiceConfig c;
        auto path = [&](char const* key) -> std::filesystem::path {
            if (!j.contains(key) || j.at(key).is_null()) {
                return {};
            }
            std::filesystem::path p = j.at(key).get<std::string>();
            return (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
        };
        try {
            c.bind_address = j.value("bind_address", c.bind_address);
            c.snapshot_path = path("snapshot_path");
            c.corpus_path = path("corpus_path");
            c.definition_fixture_path = path("definition_fixture_path");
            c.positive_list_path = path("positive_list_path");
            c.static_dir = path("static_dir");
            c.cors_allowed_origin = j.value("cors_allowed_origin", c.cors_allowed_origin);
            c.definition_cache_ttl_seconds = j.value("definition_cache_ttl_seconds", c.definition_cache_ttl_seconds);
            if (j.contains("remote_definitions")) {
                auto const& r = j.at("remote_definitions");
                c.remote_definitions.enabled = r.value("enabled", false);
                c.remote_definitions.base_url = r.value("base_url", c.remote_definitions.base_url);
            }
        } catch (json::exception const& e) {
            throw Error(Error::Kind::InvalidInput, std::string("invalid service config: ") + e.what());
        }
        return c;
    }

    static ServiceConfig load(std::filesystem::path const& file)
    {
        json j;
        try {
            j = json::parse(read_file(file));
        } catch (json::parse_error const& e) {
            throw Error(Error::Kind::Parse, "config " + file.string() + ": " + e.what());
        }
        return from_json(j, file.parent_path());
    }

    /// RIS_BIND and RIS_SNAPSHOT override the file.
    void apply_environment(std::function<const char*(const char*)> getenv = ::getenv)
    {
        if (const char* v = getenv("RIS_BIND"); v != nullptr && *v != '\0') {
            bind_address = v;
        }
        if (const char* v = getenv("RIS_SNAPSHOT"); v != nullptr && *v != '\0') {
            snapshot_path = v;
        }
    }

    [[nodiscard]] std::string host() const
    {
        const auto colon = bind_address.rfind(':');
        return colon == std::string::npos ? bind_address : bind_address.substr(0, colon);
    }

    [[nodiscard]] int port() const
    {
        const auto colon = bind_address.rfind(':');
        if (colon == std::string::npos) {
            throw Error(Error::Kind::InvalidInput, "bind_address '" + bind_address + "' must be host:port");
        }
        const auto digits = bind_address.substr(colon + 1);
        char* end = nullptr;
        const long p = std::strtol(digits.c_str(), &end, 10);
        if (digits.empty() || *end != '\0' || p < 1 || p > 65535) {
            throw Error(Error::Kind::InvalidInput, "port in bind_address '" + bind_address + "' must be 1-65535");
        }
        return static_cast<int>(p);
    }

    [[nodiscard]] std::filesystem::path corpus_file() const
    {
        return std::filesystem::is_directory(corpus_path) ? corpus_path / "corpus.jsonl" : corpus_path;
    }

    [[nodiscard]] std::filesystem::path researchers_file() const
    {
        return corpus_file().parent_path() / "researchers.json";
    }

    void validate() const
    {
        (void)port();
        auto must_exist = [](std::filesystem::path const& p, char const* what) {
            if (p.empty() || !std::filesystem::exists(p)) {
                throw Error(Error::Kind::InvalidInput,
                            std::string(what) + " '" + p.string() + "' does not exist");
            }
        };
        must_exist(snapshot_path, "snapshot_path");
        must_exist(corpus_path, "corpus_path");
        must_exist(definition_fixture_path, "definition_fixture_path");
        if (!positive_list_path.empty()) {
            must_exist(positive_list_path, "positive_list_path");
        }
        if (!static_dir.empty()) {
            must_exist(static_dir, "static_dir");
        }
        if (definition_cache_ttl_seconds < 0) {
            throw Error(Error::Kind::InvalidInput, "definition_cache_ttl_seconds must not be negative");
        }
    }
};

// ---------------------------------------------------------------------------
// Definitions

struct DefinitionResult {
    std::string term;
    bool found = false;
    std::string summary;
    std::string source_url;
    std::chrono::system_clock::time_point fetched_at{};
};

inline std::string iso8601(std::chrono::system_clock::time_point t)
{
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json to_json_value(DefinitionResult const& d)
{
    return json{{"term", d.term},
                {"found", d.found},
                {"summary", d.summary},
                {"source_url", d.source_url},
                {"fetched_at", iso8601(d.fetched_at)}};
}

enum class LookupStatus { found, not_found, unavailable };

struct Lookup {
    LookupStatus status = LookupStatus::not_found;
    std::string summary;
    std::string source_url;
};

/// Resolves a normalized term to a short encyclopedic summary.
class DefinitionProvider {
   public:
    virtual ~DefinitionProvider() = default;
    virtual Lookup lookup(std::string const& normalized_term) = 0;
};

/// Bundled definitions: a JSON object keyed by term with summary and
/// source_url members.
class FixtureDefinitionProvider final : public DefinitionProvider {
   public:
    explicit FixtureDefinitionProvider(json const& j)
    {
        for (auto const& [term, entry] : j.items()) {
            Lookup l;
            l.status = LookupStatus::found;
            l.summary = entry.value("summary", "");
            l.source_url = entry.value("source_url", "");
            if (!l.summary.empty()) {
                m_entries.emplace(normalize_label(term), std::move(l));
            }
        }
    }

    static std::shared_ptr<FixtureDefinitionProvider> load(std::filesystem::path const& path)
    {
        try {
            return std::make_shared<FixtureDefinitionProvider>(json::parse(read_file(path)));
        } catch (json::exception const& e) {
            throw Error(Error::Kind::Parse, "definitions " + path.string() + ": " + e.what());
        }
    }

    Lookup lookup(std::string const& normalized_term) override
    {
        auto it = m_entries.find(normalized_term);
        return it == m_entries.end() ? Lookup{} : it->second;
    }

   private:
    std::map<std::string, Lookup> m_entries;
};

/// Page-summary lookups against a REST encyclopedia endpoint
/// (`{base}/page/summary/{Title}`).
class RemoteSummaryProvider final : public DefinitionProvider {
   public:
    explicit RemoteSummaryProvider(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(5))
        : m_url(detail::parse_url(base_url)), m_timeout(timeout)
    {
        while (m_url.path.size() > 1 && m_url.path.back() == '/') {
            m_url.path.pop_back();
        }
        if (m_url.path == "/") {
            m_url.path.clear();
        }
    }

    Lookup lookup(std::string const& normalized_term) override
    {
        std::string title = normalized_term;
        if (!title.empty() && title[0] >= 'a' && title[0] <= 'z') {
            title[0] = static_cast<char>(title[0] - 'a' + 'A');
        }
        for (auto& c : title) {
            if (c == ' ') {
                c = '_';
            }
        }
        try {
            auto client = detail::make_client(m_url.origin, m_timeout);
            client->set_follow_location(true);
            auto res = client->Get(m_url.path + "/page/summary/" + httplib::detail::encode_url(title));
            if (!res) {
                return {LookupStatus::unavailable, {}, {}};
            }
            if (res->status == 404) {
                return {};
            }
            if (res->status != 200) {
                return {LookupStatus::unavailable, {}, {}};
            }
            const auto j = json::parse(res->body);
            Lookup l;
            l.summary = j.value("extract", "");
            if (j.contains("content_urls")) {
                l.source_url = j["content_urls"].value("desktop", json::object()).value("page", "");
            }
            l.status = l.summary.empty() ? LookupStatus::not_found : LookupStatus::found;
            return l;
        } catch (std::exception const&) {
            return {LookupStatus::unavailable, {}, {}};
        }
    }

   private:
    detail::ParsedUrl m_url;
    std::chrono::seconds m_timeout;
};

/// Tries each provider in turn; the first hit wins.
class ChainDefinitionProvider final : public DefinitionProvider {
   public:
    explicit ChainDefinitionProvider(std::vector<std::shared_ptr<DefinitionProvider>> chain) : m_chain(std::move(chain))
    {
    }

    Lookup lookup(std::string const& normalized_term) override
    {
        bool unavailable = false;
        for (auto const& p : m_chain) {
            auto l = p->lookup(normalized_term);
            if (l.status == LookupStatus::found) {
                return l;
            }
            unavailable = unavailable || l.status == LookupStatus::unavailable;
        }
        return {unavailable ? LookupStatus::unavailable : LookupStatus::not_found, {}, {}};
    }

   private:
    std::vector<std::shared_ptr<DefinitionProvider>> m_chain;
};

/// TTL cache in front of a provider. Hits and misses are both cached;
/// transient failures are not. Safe for concurrent use, and the lock is not
/// held while the inner provider runs.
class CachingDefinitionProvider {
   public:
    CachingDefinitionProvider(std::shared_ptr<DefinitionProvider> inner, std::chrono::seconds ttl,
                              Clock clock = system_clock())
        : m_inner(std::move(inner)), m_ttl(ttl), m_clock(std::move(clock))
    {
    }

    DefinitionResult resolve(std::string_view term)
    {
        const auto key = normalize_label(term);
        const auto now = m_clock();
        {
            std::lock_guard lock(m_mutex);
            auto it = m_cache.find(key);
            if (it != m_cache.end() && now - it->second.fetched_at < m_ttl) {
                return it->second;
            }
        }
        ++m_inner_calls;
        const auto l = m_inner->lookup(key);
        DefinitionResult r;
        r.term = key;
        r.found = l.status == LookupStatus::found;
        if (r.found) {
            r.summary = l.summary;
            r.source_url = l.source_url;
        }
        r.fetched_at = now;
        if (l.status != LookupStatus::unavailable) {
            std::lock_guard lock(m_mutex);
            m_cache[key] = r;
        }
        return r;
    }

    [[nodiscard]] std::size_t inner_calls() const noexcept { return m_inner_calls.load(); }

   private:
    std::shared_ptr<DefinitionProvider> m_inner;
    std::chrono::seconds m_ttl;
    Clock m_clock;
    std::mutex m_mutex;
    std::map<std::string, DefinitionResult> m_cache;
    std::atomic<std::size_t> m_inner_calls{0};
};

inline std::shared_ptr<DefinitionProvider> make_definition_chain(ServiceConfig const& cfg)
{
    std::vector<std::shared_ptr<DefinitionProvider>> chain;
    if (!cfg.definition_fixture_path.empty()) {
        chain.push_back(FixtureDefinitionProvider::load(cfg.definition_fixture_path));
    }
    if (cfg.remote_definitions.enabled) {
        chain.push_back(std::make_shared<RemoteSummaryProvider>(cfg.remote_definitions.base_url));
    }
    return std::make_shared<ChainDefinitionProvider>(std::move(chain));
}

// ---------------------------------------------------------------------------
// Service

/// Everything a request reads. Published as a whole and never modified.
struct ServiceState {
    index::IndexSnapshot snapshot;
    ingestion::CorpusStore corpus;
    std::optional<std::vector<std::string>> positive_list;
};

inline std::shared_ptr<const ServiceState> load_state(ServiceConfig const& cfg)
{
    auto st = std::make_shared<ServiceState>();
    st->snapshot = index::load_snapshot(cfg.snapshot_path);
    st->corpus = ingestion::load_corpus(cfg.corpus_file(), cfg.researchers_file());
    if (!cfg.positive_list_path.empty()) {
        try {
            st->positive_list = json::parse(read_file(cfg.positive_list_path)).get<std::vector<std::string>>();
        } catch (json::exception const& e) {
            throw Error(Error::Kind::Parse, "positive list " + cfg.positive_list_path.string() + ": " + e.what());
        }
    }
    return st;
}

struct Response {
    int status = 200;
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;

    [[nodiscard]] json parsed() const { return json::parse(body); }
};

using Params = std::multimap<std::string, std::string>;

class Service {
   public:
    Service(ServiceConfig cfg, docproc::Stopwords stopwords, std::shared_ptr<DefinitionProvider> definitions,
            Clock clock = system_clock())
        : m_cfg(std::move(cfg)),
          m_stopwords(std::move(stopwords)),
          m_definitions(std::move(definitions), std::chrono::seconds(m_cfg.definition_cache_ttl_seconds), clock)
    {
    }

    /// Swaps in a new state; requests already running keep the old one.
    void publish(std::shared_ptr<const ServiceState> state)
    {
        std::lock_guard lock(m_state_mutex);
        m_state = std::move(state);
    }

    [[nodiscard]] std::shared_ptr<const ServiceState> state() const
    {
        std::lock_guard lock(m_state_mutex);
        return m_state;
    }

    [[nodiscard]] ServiceConfig const& config() const noexcept { return m_cfg; }
    [[nodiscard]] CachingDefinitionProvider const& definitions() const noexcept { return m_definitions; }

    Response handle(std::string_view path, Params const& params = {})
    {
        try {
            if (path == "/healthz") {
                return healthz();
            }
            if (path.rfind("/api/", 0) != 0) {
                return error(404, "not found");
            }
            auto st = state();
            if (!st) {
                return error(503, "snapshot not loaded");
            }
            if (path == "/api/search") {
                return search(*st, params);
            }
            if (path == "/api/fields") {
                return with_cache(fields(*st));
            }
            if (path == "/api/wordcloud") {
                return with_cache(wordcloud(*st, params));
            }
            if (path == "/api/definition") {
                return definition(params);
            }
            constexpr std::string_view experts = "/api/experts/";
            if (path.rfind(experts, 0) == 0 && path.size() > experts.size()) {
                return expert(*st, std::string(path.substr(experts.size())));
            }
            return error(404, "not found");
        } catch (std::exception const& e) {
            return error(500, e.what());
        }
    }

   private:
    [[nodiscard]] Response json_response(int status, json const& body) const
    {
        Response r;
        r.status = status;
        r.body = body.dump();
        r.headers.emplace_back("Content-Type", "application/json");
        if (!m_cfg.cors_allowed_origin.empty()) {
            r.headers.emplace_back("Access-Control-Allow-Origin", m_cfg.cors_allowed_origin);
        }
        return r;
    }

    [[nodiscard]] Response error(int status, std::string const& message) const
    {
        return json_response(status, json{{"error", message}});
    }

    static Response with_cache(Response r)
    {
        if (r.status == 200) {
            r.headers.emplace_back("Cache-Control", "public, max-age=3600");
        }
        return r;
    }

    static std::optional<std::string> param(Params const& params, std::string const& key)
    {
        auto it = params.find(key);
        if (it == params.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    Response healthz() const
    {
        auto st = state();
        if (!st) {
            return json_response(503, json{{"status", "loading"}, {"error", "snapshot not loaded"}});
        }
        return json_response(200, json{{"status", "ok"},
                                       {"snapshot_build_timestamp", st->snapshot.build_timestamp},
                                       {"doc_count", st->snapshot.doc_count},
                                       {"researcher_count", st->snapshot.researcher_docs.size()}});
    }

    Response search(ServiceState const& st, Params const& params) const
    {
        const auto q = param(params, "q");
        if (!q || ::ris::detail::trim(*q).empty()) {
            return error(400, "missing parameter q");
        }
        long limit = 10;
        if (const auto l = param(params, "limit")) {
            char* end = nullptr;
            limit = std::strtol(l->c_str(), &end, 10);
            if (l->empty() || *end != '\0' || limit < 1 || limit > 100) {
                return error(400, "limit must be an integer between 1 and 100");
            }
        }
        const auto n = static_cast<std::size_t>(limit);

        json experts = json::array();
        for (auto const& hit : index::rank_experts(*q, st.snapshot)) {
            if (experts.size() == n) {
                break;
            }
            auto j = index::to_json_value(hit);
            if (auto const* r = st.corpus.researcher(hit.researcher)) {
                j["name"] = r->stub.full_name;
                j["department"] = r->stub.department;
            }
            experts.push_back(std::move(j));
        }
        json documents = json::array();
        for (auto const& d : index::search_documents(*q, st.snapshot)) {
            if (documents.size() == n) {
                break;
            }
            auto t = st.snapshot.doc_titles.find(d.id);
            documents.push_back(json{{"id", d.id.value},
                                     {"title", t == st.snapshot.doc_titles.end() ? std::string() : t->second},
                                     {"score", d.score}});
        }
        return json_response(200,
                             json{{"query", *q}, {"experts", std::move(experts)}, {"documents", std::move(documents)}});
    }

    Response expert(ServiceState const& st, std::string const& id) const
    {
        auto const* r = st.corpus.researcher(ResearcherId{id});
        if (r == nullptr) {
            return error(404, "unknown researcher '" + id + "'");
        }
        const auto counts = classifier::area_paper_counts(*r, st.corpus);

        struct Group {
            std::string label;
            json sources = json::array();
            std::optional<double> classifier_confidence;
        };
        std::map<std::string, Group> groups;
        auto sit = st.snapshot.researcher_areas.find(r->id);
        auto const& areas = sit != st.snapshot.researcher_areas.end() ? sit->second : r->areas;
        for (auto const& a : areas) {
            auto& g = groups[normalize_label(a.label)];
            if (g.label.empty()) {
                g.label = a.label;
            }
            g.sources.push_back(std::string(to_string(a.source)));
            if (a.source == AreaSource::DocumentClassifier) {
                g.classifier_confidence = a.confidence;
            }
        }
        json areas_json = json::array();
        for (auto const& [norm, g] : groups) {
            auto c = counts.find(norm);
            areas_json.push_back(json{{"label", g.label},
                                      {"normalized", norm},
                                      {"sources", g.sources},
                                      {"classifier_confidence", g.classifier_confidence
                                                                    ? json(*g.classifier_confidence)
                                                                    : json(nullptr)},
                                      {"paper_count", c == counts.end() ? 0 : c->second}});
        }

        json pubs = json::array();
        for (auto const& pid : r->publication_ids) {
            auto const* p = st.corpus.publication(pid);
            if (p == nullptr) {
                continue;
            }
            json labels = json::array();
            for (auto const& a : p->area_assignments) {
                labels.push_back(a.label);
            }
            pubs.push_back(json{{"id", p->id.value},
                                {"title", p->title},
                                {"authors", p->authors},
                                {"year", p->year ? json(*p->year) : json(nullptr)},
                                {"source_url", p->source_url ? json(*p->source_url) : json(nullptr)},
                                {"language", std::string(to_string(p->language))},
                                {"areas", std::move(labels)}});
        }

        json citations = json::array();
        json links = json::array();
        if (r->profile) {
            for (auto const& [year, count] : r->profile->citation_counts_by_year) {
                citations.push_back(json{{"year", year}, {"count", count}});
            }
            if (!r->profile->profile_url.empty()) {
                links.push_back(json{{"kind", "scholar_profile"}, {"url", r->profile->profile_url}});
            }
        }

        return json_response(200, json{{"id", r->id.value},
                                       {"name", r->stub.full_name},
                                       {"department", r->stub.department},
                                       {"email", r->stub.email},
                                       {"institution", r->stub.institution},
                                       {"profile_matched", r->profile.has_value()},
                                       {"needs_review", r->needs_review},
                                       {"areas", std::move(areas_json)},
                                       {"publications", std::move(pubs)},
                                       {"citations", std::move(citations)},
                                       {"external_links", std::move(links)}});
    }

    Response fields(ServiceState const& st) const
    {
        json rows = json::array();
        for (auto const& row : index::list_research_fields(st.snapshot)) {
            rows.push_back(index::to_json_value(row));
        }
        return json_response(200, rows);
    }

    Response wordcloud(ServiceState const& st, Params const& params) const
    {
        const auto flag = param(params, "positive_list");
        const bool filtered = flag && (*flag == "true" || *flag == "1");
        std::optional<std::vector<std::string>> list;
        if (filtered) {
            list = st.positive_list;
        }
        json items = json::array();
        for (auto const& item : index::wordcloud_counts(st.snapshot, m_stopwords, list)) {
            items.push_back(index::to_json_value(item));
        }
        return json_response(200, items);
    }

    Response definition(Params const& params)
    {
        const auto term = param(params, "term");
        if (!term || normalize_label(*term).empty()) {
            return error(400, "missing parameter term");
        }
        return json_response(200, to_json_value(m_definitions.resolve(*term)));
    }

    ServiceConfig m_cfg;
    docproc::Stopwords m_stopwords;
    CachingDefinitionProvider m_definitions;
    mutable std::mutex m_state_mutex;
    std::shared_ptr<const ServiceState> m_state;
};

// ---------------------------------------------------------------------------
// HTTP transport

/// Serves a Service over HTTP/1.1. GET only; every /api path and /healthz is
/// answered by Service::handle, anything else comes from static_dir with
/// index.html as the fallback for client-side routes.
class HttpServer {
   public:
    explicit HttpServer(Service& service) : m_service(service)
    {
        auto dispatch = [this](httplib::Request const& req, httplib::Response& res) {
            auto r = m_service.handle(req.path, req.params);
            std::string content_type = "application/json";
            for (auto const& [k, v] : r.headers) {
                if (k == "Content-Type") {
                    content_type = v;
                } else {
                    res.set_header(k, v);
                }
            }
            res.status = r.status;
            res.set_content(r.body, content_type);
        };
        m_server.Get("/healthz", dispatch);
        m_server.Get("/api/.*", dispatch);

        auto const& dir = m_service.config().static_dir;
        if (!dir.empty()) {
            m_server.set_mount_point("/", dir.string());
            m_server.Get(".*", [dir](httplib::Request const&, httplib::Response& res) {
                const auto index_html = dir / "index.html";
                if (std::filesystem::exists(index_html)) {
                    res.set_content(read_file(index_html), "text/html");
                } else {
                    res.status = 404;
                    res.set_content(json{{"error", "not found"}}.dump(), "application/json");
                }
            });
        } else {
            m_server.Get(".*", [](httplib::Request const&, httplib::Response& res) {
                res.status = 404;
                res.set_content(json{{"error", "not found"}}.dump(), "application/json");
            });
        }
        m_server.set_error_handler([](httplib::Request const&, httplib::Response& res) {
            if (res.body.empty()) {
                res.set_content(json{{"error", httplib::status_message(res.status)}}.dump(), "application/json");
            }
        });
    }

    ~HttpServer() { stop(); }

    HttpServer(HttpServer const&) = delete;
    HttpServer& operator=(HttpServer const&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    int start(std::string const& host, int port)
    {
        int bound = port;
        if (port == 0) {
            bound = m_server.bind_to_any_port(host);
        } else if (!m_server.bind_to_port(host, port)) {
            bound = -1;
        }
        if (bound <= 0) {
            throw Error(Error::Kind::Io, "cannot bind " + host + ":" + std::to_string(port));
        }
        m_thread = std::thread([this] { m_server.listen_after_bind(); });
        m_server.wait_until_ready();
        return bound;
    }

    /// Serves on the calling thread until stop() is called elsewhere.
    void run(std::string const& host, int port)
    {
        if (!m_server.listen(host, port)) {
            throw Error(Error::Kind::Io, "cannot listen on " + host + ":" + std::to_string(port));
        }
    }

    void stop()
    {
        m_server.stop();
        if (m_thread.joinable()) {
            m_thread.join();
        }
    }

   private:
    Service& m_service;
    httplib::Server m_server;
    std::thread m_thread;
};

}  // namespace ris::api
