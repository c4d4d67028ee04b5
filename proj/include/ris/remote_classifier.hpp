#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <string>

#include "ris/classifier.hpp"
#include "ris/detail/http.hpp"

namespace ris::classifier {

struct ChatEndpointConfig {
    std::string endpoint;  // full URL of the chat completions resource
    std::string api_key;
    std::string model = "gpt-4o-mini";
    std::chrono::seconds timeout{60};

    /// Reads RIS_LLM_ENDPOINT, RIS_LLM_KEY and optionally RIS_LLM_MODEL.
    static ChatEndpointConfig from_environment(std::function<const char*(const char*)> getenv = ::getenv)
    {
        ChatEndpointConfig c;
        const char* endpoint = getenv("RIS_LLM_ENDPOINT");
        const char* key = getenv("RIS_LLM_KEY");
        if (endpoint == nullptr || *endpoint == '\0') {
            throw Error(Error::Kind::Remote, "RIS_LLM_ENDPOINT is not set");
        }
        if (key == nullptr || *key == '\0') {
            throw Error(Error::Kind::Remote, "RIS_LLM_KEY is not set");
        }
        c.endpoint = endpoint;
        c.api_key = key;
        if (const char* model = getenv("RIS_LLM_MODEL"); model != nullptr && *model != '\0') {
            c.model = model;
        }
        return c;
    }
};

/// Client for an OpenAI-compatible chat completions endpoint.
class HttpChatClassifier final : public RemoteClassifier {
   public:
    explicit HttpChatClassifier(ChatEndpointConfig cfg)
        : m_cfg(std::move(cfg)), m_url(::ris::detail::parse_url(m_cfg.endpoint))
    {
    }

    [[nodiscard]] json request_body(std::string const& prompt) const
    {
        return json{{"model", m_cfg.model},
                    {"temperature", 0},
                    {"messages",
                     json::array({json{{"role", "system"},
                                       {"content", "You assign research areas from a fixed taxonomy."}},
                                  json{{"role", "user"}, {"content", prompt}}})}};
    }

    std::string complete(std::string const& prompt) override
    {
        auto client = ::ris::detail::make_client(m_url.origin, m_cfg.timeout);
        httplib::Headers headers = {{"Authorization", "Bearer " + m_cfg.api_key}};
        auto res = client->Post(m_url.path, headers, request_body(prompt).dump(), "application/json");
        if (!res) {
            throw Error(Error::Kind::Remote, "chat endpoint unreachable: " + httplib::to_string(res.error()));
        }
        if (res->status == 401 || res->status == 403) {
            throw Error(Error::Kind::Remote, "chat endpoint rejected the credentials (HTTP " +
                                                 std::to_string(res->status) + ")");
        }
        if (res->status != 200) {
            throw Error(Error::Kind::Remote, "chat endpoint returned HTTP " + std::to_string(res->status));
        }
        try {
            const auto j = json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (json::exception const& e) {
            throw Error(Error::Kind::Remote, std::string("malformed chat response: ") + e.what());
        }
    }

   private:
    ChatEndpointConfig m_cfg;
    ::ris::detail::ParsedUrl m_url;
};

}  // namespace ris::classifier
