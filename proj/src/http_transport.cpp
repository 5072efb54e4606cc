#include "ikgate/inference_client.hpp"

#include <httplib.h>

#include <atomic>

namespace ikgate {

using nlohmann::json;

namespace {
std::atomic<bool> g_offline{false};
std::atomic<std::size_t> g_network_calls{0};
}  // namespace

void set_offline(bool offline) { g_offline = offline; }
bool is_offline() { return g_offline; }
std::size_t network_call_count() { return g_network_calls; }

void note_network_call() {
    if (g_offline) throw OfflineViolation("network request attempted in offline mode");
    ++g_network_calls;
}

std::pair<std::string, std::string> split_base_url(std::string_view base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string_view::npos) throw ConfigError("base_url needs a scheme: " + std::string(base_url));
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string_view::npos) return {std::string(base_url), ""};
    std::string path(base_url.substr(path_start));
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {std::string(base_url.substr(0, path_start)), path};
}

HttpChatTransport::HttpChatTransport(std::string base_url, std::chrono::milliseconds timeout, std::string api_key)
    : timeout_(timeout), api_key_(std::move(api_key)) {
    std::tie(origin_, path_prefix_) = split_base_url(base_url);
}

json HttpChatTransport::post_chat(const json& body) {
    note_network_call();
    httplib::Client client(origin_);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("HTTP request failed: " + httplib::to_string(res.error()), true);
    if (res->status == 429 || res->status >= 500)
        throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body, true, res->status);
    if (res->status != 200)
        throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body, false, res->status);
    try {
        return json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw TransportError(std::string("response is not JSON: ") + e.what(), false, res->status);
    }
}

}  // namespace ikgate
