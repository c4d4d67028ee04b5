#pragma once

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ris/api_service.hpp"
#include "ris/classifier.hpp"
#include "ris/corpus_model.hpp"
#include "ris/docproc.hpp"
#include "ris/index.hpp"
#include "ris/ingestion.hpp"
#include "ris/remote_classifier.hpp"

#ifndef RIS_DEFAULT_RESOURCE_DIR
#define RIS_DEFAULT_RESOURCE_DIR "resources"
#endif

namespace ris::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kInputError = 1, kStageError = 2 };

struct Paths {
    fs::path data_dir = "ris-data";
    fs::path resources;

    [[nodiscard]] fs::path corpus() const { return data_dir / "corpus.jsonl"; }
    [[nodiscard]] fs::path researchers() const { return data_dir / "researchers.json"; }
    [[nodiscard]] fs::path snapshot() const { return data_dir / "snapshot.risidx"; }
};

/// Thrown for problems with what the operator asked for (missing files,
/// bad flags); everything else escaping a stage is a stage failure.
struct InputError : Error {
    explicit InputError(std::string const& what) : Error(Error::Kind::InvalidInput, what) {}
};

namespace detail {

inline void require_file(fs::path const& p, char const* what)
{
    if (!fs::is_regular_file(p)) {
        throw InputError(std::string(what) + " '" + p.string() + "' does not exist");
    }
}

inline ingestion::CorpusStore load_store(Paths const& paths)
{
    return ingestion::load_corpus(paths.corpus(), paths.researchers());
}

inline void save_store(Paths const& paths, ingestion::CorpusStore const& store)
{
    ingestion::save_corpus(store, paths.corpus(), paths.researchers());
}

inline std::string shell_quote(std::string const& s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('\'');
    return out;
}

struct CommandResult {
    int exit_status = -1;
    std::string output;
};

inline CommandResult run_command(std::string const& command)
{
    CommandResult r;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    char buf[8192];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        r.output.append(buf, n);
    }
    const int status = ::pclose(pipe);
    r.exit_status = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return r;
}

/// `{}` in the template is replaced by the quoted path; otherwise the path is
/// appended as the last argument.
inline std::string extractor_command(std::string const& tmpl, fs::path const& file)
{
    const auto quoted = shell_quote(file.string());
    const auto at = tmpl.find("{}");
    if (at == std::string::npos) {
        return tmpl + " " + quoted;
    }
    return tmpl.substr(0, at) + quoted + tmpl.substr(at + 2);
}

/// File stem of the last path segment of a URL, ignoring query and fragment.
inline std::string url_stem(std::string const& url)
{
    auto end = url.find_first_of("?#");
    std::string path = url.substr(0, end);
    while (!path.empty() && path.back() == '/') {
        path.pop_back();
    }
    const auto slash = path.rfind('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    return fs::path(base).stem().string();
}

inline std::int64_t default_timestamp()
{
    if (const char* v = std::getenv("SOURCE_DATE_EPOCH"); v != nullptr && *v != '\0') {
        char* end = nullptr;
        const long long t = std::strtoll(v, &end, 10);
        if (*end == '\0') {
            return t;
        }
    }
    return 0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages. Each returns its one-line summary.

inline json cmd_ingest_roster(Paths const& paths, fs::path const& roster, fs::path const& profiles,
                              std::ostream& err)
{
    detail::require_file(roster, "roster");
    if (!profiles.empty()) {
        detail::require_file(profiles, "profiles file");
    }
    const auto rules = NameRules::load(paths.resources / "name_rules.json");
    auto ext = roster.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::ris::detail::ascii_lower);
    const auto format = ext == ".json" ? ingestion::RosterFormat::json : ingestion::RosterFormat::csv;
    const auto parsed = ingestion::parse_roster(read_file(roster), format, rules);
    err << "[ingest-roster] " << parsed.stubs.size() << " researchers, " << parsed.errors.size() << " row errors\n";
    for (auto const& e : parsed.errors) {
        err << "[ingest-roster] row " << e.row << ": " << e.message << "\n";
    }
    for (auto const& w : parsed.warnings) {
        err << "[ingest-roster] warning: " << w << "\n";
    }

    std::vector<ingestion::FetchOutcome> outcomes;
    if (!profiles.empty()) {
        auto fetcher = ingestion::FixtureProfileFetcher::load(profiles, rules);
        outcomes = ingestion::fetch_profiles(parsed.stubs, fetcher);
    }
    const auto assembled = ingestion::assemble_researchers(parsed.stubs, outcomes, ingestion::MatchConfig{}, rules);

    auto store = detail::load_store(paths);
    store.researchers().clear();
    std::size_t matched = 0;
    std::size_t review = 0;
    for (auto const& r : assembled.researchers) {
        matched += r.profile ? 1 : 0;
        review += r.needs_review ? 1 : 0;
        store.put_researcher(r);
    }
    for (auto& [pid, p] : store.publications()) {
        std::erase_if(p.owners, [&](ResearcherId const& o) { return store.researcher(o) == nullptr; });
    }
    store.relink();
    classifier::remerge_researcher_areas(store);
    detail::save_store(paths, store);
    err << "[ingest-roster] " << matched << " profiles matched (" << review << " flagged for review)\n";

    return json{{"researchers_seen", parsed.stubs.size()},
                {"row_errors", parsed.errors.size()},
                {"profiles_fetched", outcomes.size()},
                {"profiles_matched", matched},
                {"needs_review", review}};
}

inline json cmd_ingest_pubs(Paths const& paths, fs::path const& file, std::ostream& err)
{
    detail::require_file(file, "publication file");
    const auto stop = docproc::Stopwords::load(paths.resources);
    const auto parsed = ingestion::parse_publication_records(read_file(file));
    for (auto const& e : parsed.errors) {
        err << "[ingest-pubs] line " << e.row << ": " << e.message << "\n";
    }
    auto store = detail::load_store(paths);
    const auto result = ingestion::ingest_publications(parsed.records, store, stop);
    for (auto const& e : result.errors) {
        err << "[ingest-pubs] record " << e.row << ": " << e.message << "\n";
    }
    classifier::remerge_researcher_areas(store);
    detail::save_store(paths, store);
    err << "[ingest-pubs] " << store.publications().size() << " publications in corpus\n";
    json summary = result.stats;
    summary["record_errors"] = parsed.errors.size() + result.errors.size();
    summary["publications_total"] = store.publications().size();
    return summary;
}

inline json cmd_extract(Paths const& paths, std::string const& extractor, fs::path const& dir, std::ostream& err)
{
    if (!fs::is_directory(dir)) {
        throw InputError("extract directory '" + dir.string() + "' does not exist");
    }
    const auto stop = docproc::Stopwords::load(paths.resources);
    auto store = detail::load_store(paths);

    std::map<std::string, std::set<PublicationId>> by_stem;
    for (auto const& [pid, p] : store.publications()) {
        by_stem[pid.value].insert(pid);
        if (p.source_url) {
            const auto stem = detail::url_stem(*p.source_url);
            if (!stem.empty()) {
                by_stem[stem].insert(pid);
            }
        }
    }

    std::vector<fs::path> files;
    for (auto const& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::size_t extracted = 0, attached = 0, unmatched = 0, failed = 0, already = 0;
    for (auto const& f : files) {
        auto it = by_stem.find(f.stem().string());
        if (it == by_stem.end()) {
            ++unmatched;
            err << "[extract] no publication for " << f.filename().string() << "\n";
            continue;
        }
        const auto res = detail::run_command(detail::extractor_command(extractor, f));
        if (res.exit_status != 0) {
            ++failed;
            err << "[extract] extractor failed on " << f.filename().string() << " (status " << res.exit_status
                << ")\n";
            continue;
        }
        ++extracted;
        const auto body = docproc::clean_body(res.output);
        for (auto const& pid : it->second) {
            auto* p = store.publication(pid);
            if (!p->body_text.empty()) {
                ++already;
                continue;
            }
            if (body.empty()) {
                continue;
            }
            p->body_text = body;
            p->language = docproc::detect_language(body, stop);
            ++attached;
        }
    }
    detail::save_store(paths, store);
    err << "[extract] attached " << attached << " bodies from " << files.size() << " files\n";
    return json{{"files_seen", files.size()},   {"extracted", extracted}, {"attached", attached},
                {"already_had_body", already}, {"unmatched", unmatched}, {"failed", failed}};
}

inline json cmd_classify(Paths const& paths, bool remote, fs::path const& taxonomy_path, std::ostream& err)
{
    const auto tax_file = taxonomy_path.empty() ? paths.resources / "taxonomy.json" : taxonomy_path;
    detail::require_file(tax_file, "taxonomy");
    const auto tax = classifier::Taxonomy::load(tax_file);
    auto store = detail::load_store(paths);

    std::unique_ptr<classifier::HttpChatClassifier> client;
    if (remote) {
        try {
            client = std::make_unique<classifier::HttpChatClassifier>(
                classifier::ChatEndpointConfig::from_environment());
        } catch (Error const& e) {
            err << "[classify] remote classifier unavailable (" << e.what() << "); using keyword classifier\n";
        }
    }
    const auto report = classifier::classify_corpus(store, tax, classifier::ClassifierConfig{}, client.get());
    for (auto const& w : report.warnings) {
        err << "[classify] " << w << "\n";
    }
    detail::save_store(paths, store);
    err << "[classify] " << report.publications_labeled << " of " << report.publications_classified
        << " publications labeled\n";
    return json{{"publications_classified", report.publications_classified},
                {"publications_labeled", report.publications_labeled},
                {"remote", client != nullptr},
                {"remote_fallbacks", report.remote_fallbacks},
                {"warnings", report.warnings.size()}};
}

inline json cmd_build_index(Paths const& paths, fs::path const& out, std::optional<std::int64_t> timestamp,
                            std::ostream& err)
{
    const auto store = detail::load_store(paths);
    const auto snap = index::build_index(store, {timestamp.value_or(detail::default_timestamp())});
    const auto target = out.empty() ? paths.snapshot() : out;
    index::save_snapshot(snap, target);
    err << "[build-index] wrote " << target.string() << "\n";
    return json{{"doc_count", snap.doc_count},
                {"terms", snap.postings.size()},
                {"researchers", snap.researcher_docs.size()},
                {"build_timestamp", snap.build_timestamp},
                {"snapshot", target.string()}};
}

inline json cmd_stats(Paths const& paths, fs::path const& snapshot_path)
{
    const auto store = detail::load_store(paths);
    std::size_t matched = 0, review = 0, bodies = 0, labeled = 0;
    std::map<std::string, std::size_t> by_source;
    std::set<std::string> labels;
    for (auto const& [rid, r] : store.researchers()) {
        matched += r.profile ? 1 : 0;
        review += r.needs_review ? 1 : 0;
        for (auto const& a : r.areas) {
            ++by_source[std::string(to_string(a.source))];
            labels.insert(normalize_label(a.label));
        }
    }
    std::map<std::string, std::size_t> langs;
    for (auto const& [pid, p] : store.publications()) {
        bodies += p.body_text.empty() ? 0 : 1;
        labeled += p.area_assignments.empty() ? 0 : 1;
        ++langs[std::string(to_string(p.language))];
    }
    json summary{{"researchers", store.researchers().size()},
                 {"profiles_matched", matched},
                 {"needs_review", review},
                 {"publications", store.publications().size()},
                 {"bodies_present", bodies},
                 {"publications_labeled", labeled},
                 {"languages", langs},
                 {"distinct_areas", labels.size()},
                 {"area_assignments_by_source", by_source}};
    const auto snap_file = snapshot_path.empty() ? paths.snapshot() : snapshot_path;
    if (fs::exists(snap_file)) {
        const auto snap = index::load_snapshot(snap_file);
        summary["snapshot"] = json{{"doc_count", snap.doc_count},
                                   {"terms", snap.postings.size()},
                                   {"build_timestamp", snap.build_timestamp}};
    } else {
        summary["snapshot"] = nullptr;
    }
    return summary;
}

inline void cmd_serve(Paths const& paths, fs::path const& config_file, std::ostream& err)
{
    detail::require_file(config_file, "config");
    auto cfg = api::ServiceConfig::load(config_file);
    cfg.apply_environment();
    try {
        cfg.validate();
    } catch (Error const& e) {
        throw InputError(e.what());
    }
    api::Service service(cfg, docproc::Stopwords::load(paths.resources), api::make_definition_chain(cfg));
    api::HttpServer server(service);
    std::thread loader([&] {
        try {
            service.publish(api::load_state(cfg));
            err << "[serve] snapshot loaded\n";
        } catch (std::exception const& e) {
            err << "[serve] cannot load snapshot: " << e.what() << "\n";
        }
    });
    err << "[serve] listening on " << cfg.bind_address << "\n";
    try {
        server.run(cfg.host(), cfg.port());
    } catch (...) {
        loader.join();
        throw;
    }
    loader.join();
}

// ---------------------------------------------------------------------------
// Entry point

/// Runs one subcommand. `args` excludes the program name.
inline int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Research information system: ingest, classify, index and serve researcher profiles", "ris"};
    app.require_subcommand(1);

    Paths paths;
    std::string data_dir = "ris-data";
    std::string resources;
    if (const char* env = std::getenv("RIS_RESOURCES"); env != nullptr && *env != '\0') {
        resources = env;
    } else {
        resources = RIS_DEFAULT_RESOURCE_DIR;
    }
    app.add_option("--data-dir", data_dir, "Data directory")->capture_default_str();
    app.add_option("--resources", resources, "Directory with stopwords, name rules and taxonomy")
        ->capture_default_str();

    std::string roster, profiles;
    auto* ingest_roster = app.add_subcommand("ingest-roster", "Import the researcher roster (CSV or JSON)");
    ingest_roster->add_option("file", roster, "Roster file")->required();
    ingest_roster->add_option("--profiles", profiles, "Scholar profile candidates (JSON)");

    std::string pubs;
    auto* ingest_pubs = app.add_subcommand("ingest-pubs", "Import publication records (JSON lines)");
    ingest_pubs->add_option("file", pubs, "Publication records")->required();

    std::string extractor, extract_dir;
    auto* extract = app.add_subcommand("extract", "Attach text produced by an external extractor");
    extract->add_option("--extractor-cmd", extractor, "Command printing a document's text; {} is the file")
        ->required();
    extract->add_option("dir", extract_dir, "Directory of documents")->required();

    bool remote = false;
    std::string taxonomy;
    auto* classify = app.add_subcommand("classify", "Assign research areas to publications");
    classify->add_flag("--remote", remote, "Use the chat endpoint from RIS_LLM_ENDPOINT / RIS_LLM_KEY");
    classify->add_option("--taxonomy", taxonomy, "Taxonomy file (default: bundled)");

    std::string index_out;
    std::optional<std::int64_t> timestamp;
    auto* build = app.add_subcommand("build-index", "Build the search snapshot");
    build->add_option("--out", index_out, "Snapshot path (default: <data-dir>/snapshot.risidx)");
    build->add_option("--timestamp", timestamp, "Build timestamp (default: SOURCE_DATE_EPOCH or 0)");

    std::string stats_snapshot;
    auto* stats = app.add_subcommand("stats", "Summarize the corpus and snapshot");
    stats->add_option("--snapshot", stats_snapshot, "Snapshot path");

    std::string config;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--config", config, "Service configuration (JSON)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return kOk;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (CLI::ParseError const& e) {
        std::string message = e.what();
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--data-dir" || args[i] == "--resources") {
                ++i;
            } else if (args[i].rfind("-", 0) != 0) {
                if (app.get_subcommand_no_throw(args[i]) == nullptr) {
                    message = "unknown subcommand '" + args[i] + "'";
                }
                break;
            }
        }
        err << "error: " << message << "\n\n" << app.help();
        return kInputError;
    }
    paths.data_dir = data_dir;
    paths.resources = resources;

    std::string stage = app.get_subcommands().front()->get_name();
    try {
        json summary;
        if (*ingest_roster) {
            summary = cmd_ingest_roster(paths, roster, profiles, err);
        } else if (*ingest_pubs) {
            summary = cmd_ingest_pubs(paths, pubs, err);
        } else if (*extract) {
            summary = cmd_extract(paths, extractor, extract_dir, err);
        } else if (*classify) {
            summary = cmd_classify(paths, remote, taxonomy, err);
        } else if (*build) {
            summary = cmd_build_index(paths, index_out, timestamp, err);
        } else if (*stats) {
            summary = cmd_stats(paths, stats_snapshot);
        } else if (*serve) {
            cmd_serve(paths, config, err);
            summary = json{{"stopped", true}};
        }
        out << summary.dump() << "\n";
        return kOk;
    } catch (InputError const& e) {
        out << json{{"stage", stage}, {"error", e.what()}}.dump() << "\n";
        err << "[" << stage << "] " << e.what() << "\n";
        return kInputError;
    } catch (std::exception const& e) {
        out << json{{"stage", stage}, {"error", e.what()}}.dump() << "\n";
        err << "[" << stage << "] failed: " << e.what() << "\n";
        return kStageError;
    }
}

}  // namespace ris::cli
