#ifndef SQLGATE_SERVICE_HPP
#define SQLGATE_SERVICE_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <optional>
#include <thread>
#include <vector>

#include "sqlgate/guard.hpp"
#include "sqlgate/store.hpp"

namespace sqlgate {

struct LogEntry {
    std::int64_t timestamp_ms = 0;
    std::string endpoint;
    std::string verdict_json;
    bool executed = false;
};

/// HTTP demo pairing each guarded route with a deliberately vulnerable
/// twin that concatenates raw input, so the attack corpus observably
/// succeeds without the guard and is blocked with it.
///
/// Routes: POST /login, /login-vulnerable, /register, /register-vulnerable,
/// /profile/update, /profile/update-vulnerable; GET /log; POST /reset
/// (test mode only).
class DemoService {
public:
    DemoService(Guard guard, MarkerPolicy policy, bool test_mode = false);
    ~DemoService();

    /// Binds and serves on a background thread. Returns false when the
    /// port cannot be bound. port 0 picks an ephemeral port.
    bool start(const std::string& host, int port);
    void stop();

    int port() const { return port_; }
    Store& store() { return store_; }
    std::uint64_t store_hash() const { return store_.content_hash(); }
    std::vector<LogEntry> log_entries() const;

private:
    struct Impl;
    void log(const std::string& endpoint, const std::string& verdict_json, bool executed);
    std::optional<Bytes> stored_address(const std::string& name);

    std::unique_ptr<Impl> impl_;
    Guard guard_;
    MarkerPolicy policy_;
    std::mutex policy_mutex_;
    Store store_;
    bool test_mode_;
    int port_ = 0;
    std::thread server_thread_;
    mutable std::mutex log_mutex_;
    std::vector<LogEntry> log_;
};

}  // namespace sqlgate

#endif
