#pragma once

#include "fuselage/runtime.hpp"
#include "fuselage/story.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace httplib {
class Server;
}

namespace fuselage::server {

struct StoryEntry {
    std::string id;
    std::shared_ptr<const StoryGraph> graph;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct Config {
    std::chrono::seconds ttl = std::chrono::hours(24); // idle time before a session is deleted
    Clock clock;                                       // defaults to steady_clock::now
};

// Transport-independent JSON API. Thread-safe: the registry has its own
// lock and each session is mutated only under its own mutex.
class Api {
public:
    explicit Api(std::vector<StoryEntry> stories, Config config = {});

    Response handle(std::string_view method, std::string_view path, std::string_view body);

    // Deletes every session idle for longer than the TTL.
    void sweep();
    std::size_t session_count() const;

private:
    struct Record {
        std::mutex mutex;
        std::string story;
        Session session;
        std::chrono::steady_clock::time_point touched; // guarded by registry_mutex_
    };

    Response list_stories() const;
    Response create_session(const std::string& sid, std::string_view body);
    Response restore_session(const std::string& sid, std::string_view body);
    Response get_view(const std::string& id);
    Response post_event(const std::string& id, std::string_view body);
    Response get_save(const std::string& id);

    std::shared_ptr<Record> lookup(const std::string& id);
    std::string insert(const std::string& story, Session session);
    std::chrono::steady_clock::time_point now() const;

    std::map<std::string, StoryEntry> stories_;
    Config config_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Record>> sessions_;
};

// 22 characters from the URL-safe base64 alphabet (132 random bits).
std::string random_session_id();

// HTTP front end: `/api/...` goes to the Api, everything else is static
// content from `static_dir`, or a placeholder page when none is given.
class HttpServer {
public:
    HttpServer(Api& api, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpServer();

    // Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    bool listen();
    void stop();

private:
    Api& api_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace fuselage::server
