#include "icc/remote_backend.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <thread>

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include "icc/error.hpp"
#include "icc/protocol.hpp"

namespace icc {

Endpoint Endpoint::parse(const std::string& spec) {
    Endpoint ep;
    std::string rest = spec;
    if (rest.rfind("unix:", 0) == 0) {
        ep.kind = Kind::Unix;
        rest = rest.substr(5);
        if (rest.rfind("//", 0) == 0) {
            rest = rest.substr(2);
        }
        if (rest.empty()) {
            raise(ErrorCode::ConfigInvalid, "unix endpoint without a path: '" + spec + "'");
        }
        ep.path = rest;
        return ep;
    }
    if (rest.rfind("tcp://", 0) == 0) {
        rest = rest.substr(6);
    }
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
        raise(ErrorCode::ConfigInvalid, "endpoint must look like tcp://host:port, got '" + spec + "'");
    }
    ep.host = rest.substr(0, colon);
    unsigned port = 0;
    const auto digits = rest.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535) {
        raise(ErrorCode::ConfigInvalid, "bad port in endpoint '" + spec + "'");
    }
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

std::string Endpoint::to_string() const {
    if (kind == Kind::Unix) {
        return "unix://" + path;
    }
    return "tcp://" + host + ":" + std::to_string(port);
}

RemoteBackend::RemoteBackend(Endpoint endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
    if (options_.pool_size == 0) {
        options_.pool_size = 1;
    }
}

RemoteBackend::~RemoteBackend() {
    for (int fd : idle_) {
        ::close(fd);
    }
}

int RemoteBackend::connect_once() const {
    if (endpoint_.kind == Endpoint::Kind::Unix) {
        int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (fd < 0) {
            return -1;
        }
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        std::strncpy(addr.sun_path, endpoint_.path.c_str(), sizeof(addr.sun_path) - 1);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            ::close(fd);
            return -1;
        }
        return fd;
    }
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const auto port = std::to_string(endpoint_.port);
    if (::getaddrinfo(endpoint_.host.c_str(), port.c_str(), &hints, &found) != 0) {
        return -1;
    }
    int fd = -1;
    for (auto* ai = found; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    return fd;
}

int RemoteBackend::acquire() {
    std::unique_lock lock(mutex_);
    available_.wait(lock, [&] { return !idle_.empty() || open_ < options_.pool_size; });
    if (!idle_.empty()) {
        int fd = idle_.back();
        idle_.pop_back();
        return fd;
    }
    ++open_;
    lock.unlock();

    for (int attempt = 0; attempt <= options_.connect_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(options_.retry_backoff * attempt);
        }
        int fd = connect_once();
        if (fd >= 0) {
            return fd;
        }
    }
    lock.lock();
    --open_;
    available_.notify_one();
    raise(ErrorCode::BackendUnavailable, "cannot connect to " + endpoint_.to_string() + " after " +
                                             std::to_string(options_.connect_retries + 1) + " attempts");
}

void RemoteBackend::release(int fd, bool healthy) {
    std::lock_guard lock(mutex_);
    if (healthy) {
        idle_.push_back(fd);
    } else {
        ::close(fd);
        --open_;
    }
    available_.notify_one();
}

std::string RemoteBackend::round_trip(const std::string& line) {
    const int fd = acquire();
    const auto start = std::chrono::steady_clock::now();
    auto fail = [&](const std::string& why) {
        release(fd, false);
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        raise(ErrorCode::BackendUnavailable, why + " (" + endpoint_.to_string() + ", after " +
                                                 std::to_string(elapsed.count()) + " ms)");
    };

    const std::string payload = line + "\n";
    std::size_t sent = 0;
    while (sent < payload.size()) {
        const auto n = ::send(fd, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(std::string("send failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }

    std::string response;
    char buf[4096];
    for (;;) {
        const auto elapsed = std::chrono::steady_clock::now() - start;
        const auto remaining =
            std::chrono::ceil<std::chrono::milliseconds>(options_.timeout - elapsed).count();
        if (remaining <= 0) {
            fail("timed out waiting for response");
        }
        pollfd pfd{fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
        if (ready < 0) {
            if (errno == EINTR) continue;
            fail(std::string("poll failed: ") + std::strerror(errno));
        }
        if (ready == 0) {
            continue;
        }
        const auto n = ::recv(fd, buf, sizeof buf, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(std::string("recv failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            fail("connection closed by backend");
        }
        response.append(buf, static_cast<std::size_t>(n));
        const auto nl = response.find('\n');
        if (nl != std::string::npos) {
            // one request in flight, so nothing may follow the newline
            const bool clean = nl + 1 == response.size();
            response.resize(nl);
            release(fd, clean);
            return response;
        }
    }
}

std::string RemoteBackend::next_id() {
    return "r" + std::to_string(counter_.fetch_add(1) + 1);
}

ScoreResponse RemoteBackend::score(const ScoreRequest& req) {
    const auto id = next_id();
    return protocol::decode_score(protocol::parse_response(round_trip(protocol::encode(id, req)), id));
}

GenerateResponse RemoteBackend::generate(const GenerateRequest& req) {
    const auto id = next_id();
    return protocol::decode_generate(protocol::parse_response(round_trip(protocol::encode(id, req)), id));
}

EmbedResponse RemoteBackend::embed(const EmbedRequest& req) {
    const auto id = next_id();
    return protocol::decode_embed(protocol::parse_response(round_trip(protocol::encode(id, req)), id));
}

std::string RemoteBackend::fingerprint() const {
    return "remote(" + endpoint_.to_string() + ")";
}

} // namespace icc
