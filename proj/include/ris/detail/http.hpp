#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include <httplib.h>

#include "ris/corpus_model.hpp"

namespace ris::detail {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/', may be just "/"
};

inline ParsedUrl parse_url(std::string_view url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(Error::Kind::InvalidInput, "URL '" + std::string(url) + "' has no scheme");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(Error::Kind::InvalidInput, "unsupported URL scheme '" + std::string(scheme) + "'");
    }
    const auto rest = url.substr(scheme_end + 3);
    const auto slash = rest.find('/');
    ParsedUrl out;
    out.origin = std::string(url.substr(0, scheme_end + 3)) + std::string(rest.substr(0, slash));
    out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    if (out.origin.size() == scheme_end + 3) {
        throw Error(Error::Kind::InvalidInput, "URL '" + std::string(url) + "' has no host");
    }
    return out;
}

inline std::unique_ptr<httplib::Client> make_client(std::string const& origin, std::chrono::seconds timeout)
{
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (origin.rfind("https://", 0) == 0) {
        throw Error(Error::Kind::Remote, "this build has no TLS support; cannot reach " + origin);
    }
#endif
    auto client = std::make_unique<httplib::Client>(origin);
    if (!client->is_valid()) {
        throw Error(Error::Kind::Remote, "cannot create HTTP client for " + origin);
    }
    client->set_connection_timeout(timeout);
    client->set_read_timeout(timeout);
    client->set_write_timeout(timeout);
    return client;
}

}  // namespace ris::detail
