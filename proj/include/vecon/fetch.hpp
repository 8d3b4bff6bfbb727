#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "vecon/errors.hpp"
#include "vecon/ingest.hpp"

namespace vecon {

/// Client behavior for the price API: spacing between request dispatches,
/// retry count, and a doubling backoff.
struct FetchPolicy {
    int min_request_interval_ms = 200;
    int max_retries = 3;
    int backoff_base_ms = 500;

    static FetchPolicy create(int interval_ms, int retries, int backoff_ms) {
        require(interval_ms >= 0, errc::invalid_value, "negative request interval");
        require(retries >= 0, errc::invalid_value, "negative retry count");
        require(backoff_ms >= 1, errc::invalid_value, "backoff must be positive");
        return FetchPolicy{interval_ms, retries, backoff_ms};
    }
};

struct RawDocument {
    std::int64_t item_id = 0;
    std::string body;
};

namespace detail {

inline bool is_http_source(std::string_view source) {
    return source.starts_with("http://") || source.starts_with("https://");
}

/// Splits "http://host:port/some/prefix" into origin and path prefix.
inline std::pair<std::string, std::string> split_origin(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

}  // namespace detail

/// Fetches one raw document per id. A source starting with http(s):// is an
/// endpoint serving GET <prefix>/item_<id>.json; anything else is a fixture
/// directory holding files of the same name. Request dispatch is serialized
/// and spaced by at least min_request_interval_ms; connection errors and 5xx
/// responses are retried with doubling backoff, 4xx fails immediately.
inline std::vector<RawDocument> fetch_documents(std::span<const std::int64_t> item_ids,
                                                const FetchPolicy& policy,
                                                const std::string& source) {
    namespace fs = std::filesystem;
    std::vector<RawDocument> docs;
    docs.reserve(item_ids.size());

    if (!detail::is_http_source(source)) {
        const fs::path dir(source);
        require(fs::is_directory(dir), errc::source_unavailable,
                "fixture directory not found: " + source);
        for (std::int64_t id : item_ids) {
            const fs::path file = dir / ("item_" + std::to_string(id) + ".json");
            require(fs::exists(file), errc::missing_fixture, "no fixture " + file.string());
            docs.push_back(RawDocument{id, detail::read_file(file, errc::missing_fixture)});
        }
        return docs;
    }

    const auto [origin, prefix] = detail::split_origin(source);
    httplib::Client client(origin);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(10, 0);

    using clock = std::chrono::steady_clock;
    auto next_dispatch = clock::now();
    const auto interval = std::chrono::milliseconds(policy.min_request_interval_ms);

    for (std::int64_t id : item_ids) {
        const std::string path = prefix + "/item_" + std::to_string(id) + ".json";
        std::string body;
        bool done = false;
        for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(policy.backoff_base_ms) * (1 << (attempt - 1)));
            std::this_thread::sleep_until(next_dispatch);
            next_dispatch = clock::now() + interval;

            httplib::Result res = client.Get(path);
            if (res && res->status == 200) {
                body = res->body;
                done = true;
                break;
            }
            if (res && res->status >= 400 && res->status < 500)
                fail(errc::source_unavailable,
                     "GET " + origin + path + " -> " + std::to_string(res->status));
        }
        require(done, errc::source_unavailable,
                "GET " + origin + path + " failed after " +
                    std::to_string(policy.max_retries) + " retries");
        docs.push_back(RawDocument{id, std::move(body)});
    }
    return docs;
}

/// Fixture-mode id discovery: every item_<id>.json in the directory,
/// ascending by id.
inline std::vector<std::int64_t> discover_fixture_ids(const std::string& source) {
    namespace fs = std::filesystem;
    require(!detail::is_http_source(source), errc::invalid_value,
            "id discovery needs a fixture directory, not an endpoint");
    const fs::path dir(source);
    require(fs::is_directory(dir), errc::source_unavailable,
            "fixture directory not found: " + source);
    std::vector<std::int64_t> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (!name.starts_with("item_") || !name.ends_with(".json")) continue;
        const std::string_view digits = std::string_view(name).substr(5, name.size() - 10);
        if (digits.empty()) continue;
        ids.push_back(detail::parse_i64(digits, errc::invalid_value, "bad fixture name"));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace vecon
