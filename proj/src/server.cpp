#include "fuselage/server.hpp"

#include "fuselage/wire.hpp"

#include "httplib.h"

#include <random>

namespace fuselage::server {

using json = nlohmann::json;

namespace {

Response reply(int status, const json& body)
{
    return {status, body.dump() + "\n", "application/json"};
}

Response error(int status, const std::string& code, const std::string& message)
{
    return reply(status, json{{"error", code}, {"message", message}});
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/')
            ++i;
        std::size_t j = i;
        while (j < path.size() && path[j] != '/')
            ++j;
        if (j > i)
            out.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<json> parse_body(std::string_view body)
{
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos)
        return json::object();
    try {
        return json::parse(body.begin(), body.end());
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
}

const char* const kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>fuselage</title></head>
<body><h1>fuselage</h1><p>No player UI is installed. The JSON API lives under <code>/api</code>.</p></body></html>
)";

} // namespace

std::string random_session_id()
{
    static constexpr char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    thread_local std::mt19937_64 rng = [] {
        std::random_device rd;
        std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
        return std::mt19937_64(seq);
    }();
    std::string id(22, '\0');
    for (auto& c : id)
        c = alphabet[rng() % 64];
    return id;
}

Api::Api(std::vector<StoryEntry> stories, Config config) : config_(std::move(config))
{
    for (auto& s : stories)
        stories_.emplace(s.id, std::move(s));
}

std::chrono::steady_clock::time_point Api::now() const
{
    return config_.clock ? config_.clock() : std::chrono::steady_clock::now();
}

std::size_t Api::session_count() const
{
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
}

void Api::sweep()
{
    const auto t = now();
    std::lock_guard lock(registry_mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (t - it->second->touched > config_.ttl)
            it = sessions_.erase(it);
        else
            ++it;
    }
}

std::shared_ptr<Api::Record> Api::lookup(const std::string& id)
{
    const auto t = now();
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end())
        return nullptr;
    if (t - it->second->touched > config_.ttl) {
        sessions_.erase(it);
        return nullptr;
    }
    it->second->touched = t;
    return it->second;
}

std::string Api::insert(const std::string& story, Session session)
{
    auto rec = std::make_shared<Record>();
    rec->story = story;
    rec->session = std::move(session);
    rec->touched = now();
    std::lock_guard lock(registry_mutex_);
    std::string id;
    do
        id = random_session_id();
    while (sessions_.count(id));
    sessions_.emplace(id, std::move(rec));
    return id;
}

Response Api::handle(std::string_view method, std::string_view path, std::string_view body)
{
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api")
        return error(404, "not-found", "no such route");

    if (parts[1] == "stories") {
        if (parts.size() == 2 && method == "GET")
            return list_stories();
        if (parts.size() == 4 && method == "POST" && parts[3] == "sessions")
            return create_session(parts[2], body);
        if (parts.size() == 4 && method == "POST" && parts[3] == "sessions:restore")
            return restore_session(parts[2], body);
    } else if (parts[1] == "sessions" && parts.size() >= 3) {
        if (parts.size() == 3 && method == "GET")
            return get_view(parts[2]);
        if (parts.size() == 4 && method == "POST" && parts[3] == "events")
            return post_event(parts[2], body);
        if (parts.size() == 4 && method == "GET" && parts[3] == "save")
            return get_save(parts[2]);
    }
    return error(404, "not-found", "no such route");
}

Response Api::list_stories() const
{
    json list = json::array();
    for (const auto& [id, s] : stories_) {
        std::size_t endings = 0;
        for (const auto& [nid, n] : s.graph->nodes)
            endings += n.kind() == NodeKind::Ending;
        list.push_back({{"id", id}, {"title", s.graph->title}, {"endings_count", endings}});
    }
    return reply(200, list);
}

Response Api::create_session(const std::string& sid, std::string_view body)
{
    auto story = stories_.find(sid);
    if (story == stories_.end())
        return error(404, "unknown-story", "no story '" + sid + "'");
    auto j = parse_body(body);
    if (!j || !j->is_object())
        return error(400, "malformed-body", "body must be a JSON object");
    std::uint64_t seed = 0;
    for (const auto& [k, v] : j->items()) {
        if (k != "seed")
            return error(400, "malformed-body", "unexpected key '" + k + "'");
        if (!v.is_number_unsigned())
            return error(400, "malformed-body", "seed must be a non-negative integer");
        seed = v.get<std::uint64_t>();
    }
    Session s = new_session(story->second.graph, seed);
    json view = wire::view_to_json(fuselage::view(s));
    std::string id = insert(sid, std::move(s));
    return reply(201, json{{"session_id", id}, {"view", std::move(view)}});
}

Response Api::restore_session(const std::string& sid, std::string_view body)
{
    auto story = stories_.find(sid);
    if (story == stories_.end())
        return error(404, "unknown-story", "no story '" + sid + "'");
    Session s;
    try {
        s = restore(story->second.graph, decode_save(body));
    } catch (const HashMismatch& e) {
        return error(409, "hash-mismatch", e.what());
    } catch (const UnsupportedVersion& e) {
        return error(400, "unsupported-version", e.what());
    } catch (const MalformedSave& e) {
        return error(400, "malformed-save", e.what());
    }
    json view = wire::view_to_json(fuselage::view(s));
    std::string id = insert(sid, std::move(s));
    return reply(201, json{{"session_id", id}, {"view", std::move(view)}});
}

Response Api::get_view(const std::string& id)
{
    auto rec = lookup(id);
    if (!rec)
        return error(404, "unknown-session", "no session '" + id + "'");
    std::lock_guard lock(rec->mutex);
    return reply(200, json{{"view", wire::view_to_json(fuselage::view(rec->session))}});
}

Response Api::post_event(const std::string& id, std::string_view body)
{
    auto rec = lookup(id);
    if (!rec)
        return error(404, "unknown-session", "no session '" + id + "'");
    auto j = parse_body(body);
    if (!j)
        return error(400, "malformed-event", "body is not valid JSON");
    Event event;
    try {
        event = wire::event_from_json(*j);
    } catch (const wire::MalformedEvent& e) {
        return error(400, "malformed-event", e.what());
    }

    std::lock_guard lock(rec->mutex);
    StepResult r;
    try {
        r = apply_event(rec->session, event);
    } catch (const SessionFinished&) {
        return error(409, "session-finished", "the session has reached its ending");
    }
    rec->session = std::move(r.session);
    return reply(200, json{{"view", wire::view_to_json(fuselage::view(rec->session))},
                          {"notes", wire::notes_to_json(r.notes)},
                          {"accepted", r.accepted},
                          {"finished", rec->session.finished.has_value()}});
}

Response Api::get_save(const std::string& id)
{
    auto rec = lookup(id);
    if (!rec)
        return error(404, "unknown-session", "no session '" + id + "'");
    std::lock_guard lock(rec->mutex);
    return {200, encode_save(save(rec->session)), "application/json"};
}

HttpServer::HttpServer(Api& api, std::optional<std::filesystem::path> static_dir)
    : api_(api), server_(std::make_unique<httplib::Server>())
{
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        Response r = api_.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server_->Get(R"(/api/.*)", forward);
    server_->Post(R"(/api/.*)", forward);
    if (static_dir) {
        server_->set_mount_point("/", static_dir->string());
    } else {
        server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0)
        return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen()
{
    return server_->listen_after_bind();
}

void HttpServer::stop()
{
    server_->stop();
}

} // namespace fuselage::server
