#include "icc/line_server.hpp"

#include <cerrno>
#include <cstring>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include "icc/error.hpp"
#include "icc/protocol.hpp"

namespace icc {

LineServer::LineServer(std::shared_ptr<Backend> backend, const Endpoint& listen_on)
    : backend_(std::move(backend)) {
    if (listen_on.kind == Endpoint::Kind::Unix) {
        listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (listen_fd_ < 0) {
            raise(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
        }
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        std::strncpy(addr.sun_path, listen_on.path.c_str(), sizeof(addr.sun_path) - 1);
        ::unlink(listen_on.path.c_str());
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            ::close(listen_fd_);
            raise(ErrorCode::IoError, "cannot bind " + listen_on.path + ": " + std::strerror(errno));
        }
        unix_path_ = listen_on.path;
    } else {
        listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listen_fd_ < 0) {
            raise(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
        }
        int one = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(listen_on.port);
        const auto host = listen_on.host == "localhost" ? std::string("127.0.0.1") : listen_on.host;
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(listen_fd_);
            raise(ErrorCode::ConfigInvalid, "listen host must be an IPv4 address: '" + listen_on.host + "'");
        }
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            ::close(listen_fd_);
            raise(ErrorCode::IoError, "cannot bind " + listen_on.to_string() + ": " + std::strerror(errno));
        }
        socklen_t len = sizeof addr;
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }
    if (::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        raise(ErrorCode::IoError, std::string("listen: ") + std::strerror(errno));
    }
}

LineServer::~LineServer() {
    stop();
}

void LineServer::start() {
    acceptor_ = std::thread([this] { accept_loop(); });
}

void LineServer::serve_forever() {
    accept_loop();
}

void LineServer::stop() {
    if (stopping_.exchange(true)) {
        return;
    }
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable()) {
        acceptor_.join();
    }
    {
        std::lock_guard lock(mutex_);
        for (int fd : client_fds_) {
            ::shutdown(fd, SHUT_RDWR);
        }
    }
    for (auto& t : workers_) {
        if (t.joinable()) {
            t.join();
        }
    }
    if (!unix_path_.empty()) {
        ::unlink(unix_path_.c_str());
    }
}

void LineServer::accept_loop() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            return;
        }
        std::lock_guard lock(mutex_);
        client_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void LineServer::serve_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    for (;;) {
        const auto n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            break;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t nl;
        while ((nl = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            std::string reply;
            {
                std::lock_guard lock(backend_mutex_);
                reply = protocol::handle_request_line(*backend_, line) + "\n";
            }
            std::size_t sent = 0;
            while (sent < reply.size()) {
                const auto w = ::send(fd, reply.data() + sent, reply.size() - sent, MSG_NOSIGNAL);
                if (w < 0) {
                    if (errno == EINTR) continue;
                    sent = reply.size();
                    buffer.clear();
                    break;
                }
                sent += static_cast<std::size_t>(w);
            }
        }
    }
    std::lock_guard lock(mutex_);
    std::erase(client_fds_, fd);
    ::close(fd);
}

} // namespace icc
