#include "sqlgate/service.hpp"

#include <chrono>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sqlgate {

using nlohmann::json;

struct DemoService::Impl {
    httplib::Server server;
};

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

json rows_json(const ResultSet& rs) {
    json j;
    j["columns"] = rs.columns;
    json rows = json::array();
    for (const auto& row : rs.rows) {
        json r = json::array();
        for (const auto& cell : row)
            r.push_back(json::string_t(cell));
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j;
}

std::optional<json> parse_body(const httplib::Request& req) {
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

std::optional<std::string> str_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
    return j[key].get<std::string>();
}

}  // namespace

DemoService::DemoService(Guard guard, MarkerPolicy policy, bool test_mode)
    : impl_(std::make_unique<Impl>()),
      guard_(std::move(guard)),
      policy_(std::move(policy)),
      store_(Store::demo_seed()),
      test_mode_(test_mode) {
    auto& server = impl_->server;

    // --- guarded login -----------------------------------------------------
    server.Post("/login", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto name = body ? str_field(*body, "name") : std::nullopt;
        auto password = body ? str_field(*body, "password") : std::nullopt;
        if (!name || !password) {
            res.status = 400;
            return;
        }
        Verdict verdict;
        {
            std::lock_guard lock(policy_mutex_);
            verdict = guard_.validate("login", {{"name", *name}, {"password", *password}}, policy_);
        }
        if (!verdict.allowed) {
            // Blocked verdicts never echo the parser's expected/found detail.
            res.status = 403;
            res.set_content(verdict.to_json(), "application/json");
            log("/login", verdict.to_json(), false);
            return;
        }
        ParseResult parsed = parse_unmarked(verdict.stripped_query);
        ExecResult result = store_.execute(std::get<ParseTree>(parsed));
        log("/login", verdict.to_json(), true);
        if (const StoreError* se = std::get_if<StoreError>(&result)) {
            res.status = 500;
            res.set_content(json{{"error", se->message}}.dump(), "application/json");
            return;
        }
        const ResultSet& rs = std::get<ResultSet>(result);
        res.status = rs.rows.empty() ? 401 : 200;
        res.set_content(rows_json(rs).dump(), "application/json");
    });

    // --- vulnerable login: raw concatenation, parser errors echoed ---------
    server.Post("/login-vulnerable", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto name = body ? str_field(*body, "name") : std::nullopt;
        auto password = body ? str_field(*body, "password") : std::nullopt;
        if (!name || !password) {
            res.status = 400;
            return;
        }
        Bytes raw = "SELECT * FROM login WHERE name = '" + *name + "' AND password = '" +
                    *password + "';";
        ParseResult parsed = parse_unmarked(raw);
        if (const ParseError* pe = std::get_if<ParseError>(&parsed)) {
            res.status = 500;
            res.set_content("SQL syntax error: " + pe->to_json(), "text/plain");
            log("/login-vulnerable", pe->to_json(), false);
            return;
        }
        ExecResult result = store_.execute(std::get<ParseTree>(parsed));
        log("/login-vulnerable", "{\"outcome\":\"executed\"}", true);
        if (const StoreError* se = std::get_if<StoreError>(&result)) {
            res.status = 500;
            res.set_content("store error: " + se->message, "text/plain");
            return;
        }
        res.status = 200;
        res.set_content(rows_json(std::get<ResultSet>(result)).dump(), "application/json");
    });

    // --- guarded registration (stored-data entry point) ---------------------
    server.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto name = body ? str_field(*body, "name") : std::nullopt;
        auto address = body ? str_field(*body, "address") : std::nullopt;
        auto phone = body ? str_field(*body, "phone") : std::nullopt;
        if (!name || !address || !phone) {
            res.status = 400;
            return;
        }
        Verdict verdict;
        {
            std::lock_guard lock(policy_mutex_);
            verdict = guard_.validate_stored(
                "register_user", {{"name", *name}, {"address", *address}, {"phone", *phone}},
                policy_);
        }
        if (!verdict.allowed) {
            res.status = 403;
            res.set_content(verdict.to_json(), "application/json");
            log("/register", verdict.to_json(), false);
            return;
        }
        ParseResult parsed = parse_unmarked(verdict.stripped_query);
        ExecResult result = store_.execute(std::get<ParseTree>(parsed));
        log("/register", verdict.to_json(), true);
        if (const StoreError* se = std::get_if<StoreError>(&result)) {
            res.status = 500;
            res.set_content(json{{"error", se->message}}.dump(), "application/json");
            return;
        }
        res.status = 200;
        res.set_content(json{{"registered", *name}}.dump(), "application/json");
    });

    // --- vulnerable registration: stores raw bytes, no validation ----------
    server.Post("/register-vulnerable",
                [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto name = body ? str_field(*body, "name") : std::nullopt;
        auto address = body ? str_field(*body, "address") : std::nullopt;
        auto phone = body ? str_field(*body, "phone") : std::nullopt;
        if (!name || !address || !phone) {
            res.status = 400;
            return;
        }
        store_.insert_row("users", {*name, *address, *phone});
        log("/register-vulnerable", "{\"outcome\":\"stored\"}", true);
        res.status = 200;
        res.set_content(json{{"registered", *name}}.dump(), "application/json");
    });

    // --- guarded profile update: second-order use point --------------------
    server.Post("/profile/update", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto name = body ? str_field(*body, "name") : std::nullopt;
        if (!name) {
            res.status = 400;
            return;
        }
        auto stored = stored_address(*name);
        if (!stored) {
            res.status = 404;
            return;
        }
        Verdict verdict;
        {
            std::lock_guard lock(policy_mutex_);
            verdict = guard_.validate_stored("profile_update",
                                             {{"address", *stored}, {"name", *name}}, policy_);
        }
        if (!verdict.allowed) {
            res.status = 403;
            res.set_content(verdict.to_json(), "application/json");
            log("/profile/update", verdict.to_json(), false);
            return;
        }
        ParseResult parsed = parse_unmarked(verdict.stripped_query);
        ExecResult result = store_.execute(std::get<ParseTree>(parsed));
        log("/profile/update", verdict.to_json(), true);
        if (const StoreError* se = std::get_if<StoreError>(&result)) {
            res.status = 500;
            res.set_content(json{{"error", se->message}}.dump(), "application/json");
            return;
        }
        res.status = 200;
        res.set_content(json{{"updated", *name}}.dump(), "application/json");
    });

    // --- vulnerable profile update: raw concatenation of the stored value --
    server.Post("/profile/update-vulnerable",
                [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto name = body ? str_field(*body, "name") : std::nullopt;
        if (!name) {
            res.status = 400;
            return;
        }
        auto stored = stored_address(*name);
        if (!stored) {
            res.status = 404;
            return;
        }
        Bytes raw =
            "UPDATE users SET address = '" + *stored + "' WHERE name = '" + *name + "';";
        ParseResult parsed = parse_unmarked(raw);
        if (const ParseError* pe = std::get_if<ParseError>(&parsed)) {
            res.status = 500;
            res.set_content("SQL syntax error: " + pe->to_json(), "text/plain");
            log("/profile/update-vulnerable", pe->to_json(), false);
            return;
        }
        ExecResult result = store_.execute(std::get<ParseTree>(parsed));
        log("/profile/update-vulnerable", "{\"outcome\":\"executed\"}", true);
        if (const StoreError* se = std::get_if<StoreError>(&result)) {
            res.status = 500;
            res.set_content("store error: " + se->message, "text/plain");
            return;
        }
        res.status = 200;
        res.set_content(json{{"updated", *name}}.dump(), "application/json");
    });

    server.Get("/log", [this](const httplib::Request&, httplib::Response& res) {
        json j = json::array();
        for (const LogEntry& e : log_entries())
            j.push_back({{"timestamp_ms", e.timestamp_ms},
                         {"endpoint", e.endpoint},
                         {"verdict", e.verdict_json},
                         {"executed", e.executed}});
        res.set_content(j.dump(), "application/json");
    });

    if (test_mode_) {
        server.Post("/reset", [this](const httplib::Request&, httplib::Response& res) {
            store_.reset_from(Store::demo_seed());
            res.status = 200;
            res.set_content("{\"reset\":true}", "application/json");
        });
        server.Get("/store-hash", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(json{{"hash", store_.content_hash()}}.dump(), "application/json");
        });
    }
}

std::optional<Bytes> DemoService::stored_address(const std::string& name) {
    // Snapshot under the store's own locking via copy.
    Store snapshot(store_);
    const StoreTable* users = snapshot.table("users");
    if (!users) return std::nullopt;
    for (const auto& row : users->rows)
        if (row.size() == 3 && row[0] == name) return row[1];
    return std::nullopt;
}

DemoService::~DemoService() { stop(); }

bool DemoService::start(const std::string& host, int port) {
    auto& server = impl_->server;
    if (port == 0) {
        port_ = server.bind_to_any_port(host);
        if (port_ < 0) return false;
    } else {
        if (!server.bind_to_port(host, port)) return false;
        port_ = port;
    }
    server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    server.wait_until_ready();
    return true;
}

void DemoService::stop() {
    if (server_thread_.joinable()) {
        impl_->server.stop();
        server_thread_.join();
    }
}

std::vector<LogEntry> DemoService::log_entries() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

void DemoService::log(const std::string& endpoint, const std::string& verdict_json,
                      bool executed) {
    std::lock_guard lock(log_mutex_);
    log_.push_back(LogEntry{now_ms(), endpoint, verdict_json, executed});
}

}  // namespace sqlgate
