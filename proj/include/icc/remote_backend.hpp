#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "icc/scorer_gateway.hpp"

namespace icc {

struct Endpoint {
    enum class Kind { Tcp, Unix } kind = Kind::Tcp;
    std::string host;
    std::uint16_t port = 0;
    std::string path;

    // "tcp://host:port", "host:port", "unix:/path" or "unix:///path".
    static Endpoint parse(const std::string& spec);
    std::string to_string() const;
};

struct RemoteOptions {
    std::size_t pool_size = 4;
    std::chrono::milliseconds timeout{60000};
    int connect_retries = 2;
    std::chrono::milliseconds retry_backoff{50};
};

// Line-delimited JSON over a stream socket. One request in flight per
// connection; at most pool_size connections; ids are client-assigned and
// checked on every response. Only connection failures are retried.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(Endpoint endpoint, RemoteOptions options = {});
    ~RemoteBackend() override;

    RemoteBackend(const RemoteBackend&) = delete;
    RemoteBackend& operator=(const RemoteBackend&) = delete;

    ScoreResponse score(const ScoreRequest& req) override;
    GenerateResponse generate(const GenerateRequest& req) override;
    EmbedResponse embed(const EmbedRequest& req) override;
    std::string fingerprint() const override;

private:
    // Sends one line and returns the response line.
    std::string round_trip(const std::string& line);
    int acquire();
    void release(int fd, bool healthy);
    int connect_once() const;
    std::string next_id();

    Endpoint endpoint_;
    RemoteOptions options_;
    std::mutex mutex_;
    std::condition_variable available_;
    std::vector<int> idle_;
    std::size_t open_ = 0;
    std::atomic<std::uint64_t> counter_{0};
};

} // namespace icc
