#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "icc/remote_backend.hpp"
#include "icc/scorer_gateway.hpp"

namespace icc {

// Serves a Backend over the line-delimited JSON protocol, one thread per
// connection. Port 0 binds an ephemeral TCP port; see port().
class LineServer {
public:
    LineServer(std::shared_ptr<Backend> backend, const Endpoint& listen_on);
    ~LineServer();

    LineServer(const LineServer&) = delete;
    LineServer& operator=(const LineServer&) = delete;

    std::uint16_t port() const { return port_; }

    void start();
    // Blocks until stop() is called from another thread.
    void serve_forever();
    void stop();

private:
    void accept_loop();
    void serve_connection(int fd);

    std::shared_ptr<Backend> backend_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::string unix_path_;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex mutex_;
    std::vector<int> client_fds_;
    std::vector<std::thread> workers_;
    std::mutex backend_mutex_;
};

} // namespace icc
