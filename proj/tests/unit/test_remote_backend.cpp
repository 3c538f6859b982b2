#include <chrono>
#include <cstring>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "conformance.hpp"
#include "fixtures.hpp"
#include "icc/error.hpp"
#include "icc/line_server.hpp"
#include "icc/remote_backend.hpp"
#include "icc/scoring.hpp"
#include "icc/synthetic_backend.hpp"

using icc::Endpoint;
using icc::LineServer;
using icc::RemoteBackend;

namespace {

Endpoint local(std::uint16_t port) {
    return Endpoint::parse("tcp://127.0.0.1:" + std::to_string(port));
}

// Plain blocking client for sending raw lines.
class RawClient {
public:
    explicit RawClient(std::uint16_t port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            throw std::runtime_error("connect failed");
        }
    }
    ~RawClient() { ::close(fd_); }

    std::string exchange(const std::string& line) {
        const auto payload = line + "\n";
        ::send(fd_, payload.data(), payload.size(), MSG_NOSIGNAL);
        std::string out;
        char c = 0;
        while (::recv(fd_, &c, 1, 0) == 1 && c != '\n') {
            out.push_back(c);
        }
        return out;
    }

private:
    int fd_ = -1;
};

// Accepts connections and never answers.
class SilentListener {
public:
    SilentListener() {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = 0;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
        ::listen(fd_, 4);
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }
    ~SilentListener() { ::close(fd_); }
    std::uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Answers every request with a fixed error code.
class FailingBackend final : public icc::Backend {
public:
    explicit FailingBackend(icc::ErrorCode code) : code_(code) {}
    icc::ScoreResponse score(const icc::ScoreRequest&) override { icc::raise(code_, "refused"); }
    icc::GenerateResponse generate(const icc::GenerateRequest&) override { icc::raise(code_, "refused"); }
    std::string fingerprint() const override { return "failing"; }

private:
    icc::ErrorCode code_;
};

icc::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const icc::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no icc::Error thrown";
    return icc::ErrorCode::InvalidArgument;
}

} // namespace

TEST(Endpoint, ParsesSupportedForms) {
    auto e = Endpoint::parse("tcp://localhost:7000");
    EXPECT_EQ(e.kind, Endpoint::Kind::Tcp);
    EXPECT_EQ(e.host, "localhost");
    EXPECT_EQ(e.port, 7000);
    EXPECT_EQ(Endpoint::parse("127.0.0.1:80").port, 80);
    EXPECT_EQ(Endpoint::parse("unix:/tmp/x.sock").path, "/tmp/x.sock");
    EXPECT_EQ(Endpoint::parse("unix:///tmp/x.sock").path, "/tmp/x.sock");
    EXPECT_EQ(code_of([] { Endpoint::parse("localhost"); }), icc::ErrorCode::ConfigInvalid);
    EXPECT_EQ(code_of([] { Endpoint::parse("host:99999"); }), icc::ErrorCode::ConfigInvalid);
    EXPECT_EQ(code_of([] { Endpoint::parse("unix:"); }), icc::ErrorCode::ConfigInvalid);
}

TEST(RemoteBackend, ScoresThroughLineServerLikeInProcess) {
    auto synthetic = std::make_shared<icc::SyntheticBackend>();
    LineServer server(synthetic, local(0));
    server.start();
    const icc::Gateway remote(std::make_shared<RemoteBackend>(local(server.port())));
    const icc::Gateway in_process(synthetic);

    const icc::ScoreRequest req{"<image>Output:bull<|endofchunk|><image>Output:", {"i7", "t0"}, {"bull", "grey wolf"}};
    EXPECT_EQ(remote.score_candidates(req), in_process.score_candidates(req));
    const icc::GenerateRequest gen{"distinguishing a bull", {}, 20, 1.0};
    EXPECT_EQ(remote.generate(gen).text, in_process.generate(gen).text);
    const icc::EmbedRequest emb{{{"a", "image", "a.jpg"}, {"b", "label", "bull"}}};
    EXPECT_EQ(remote.embed(emb).vectors, in_process.embed(emb).vectors);
    server.stop();
}

TEST(RemoteBackend, ConcurrentCallersShareThePool) {
    auto synthetic = std::make_shared<icc::SyntheticBackend>();
    LineServer server(synthetic, local(0));
    server.start();
    icc::RemoteOptions options;
    options.pool_size = 3;
    const icc::Gateway remote(std::make_shared<RemoteBackend>(local(server.port()), options));
    std::atomic<int> good{0};
    {
        std::vector<std::jthread> threads;
        for (int t = 0; t < 6; ++t) {
            threads.emplace_back([&, t] {
                for (int i = 0; i < 20; ++i) {
                    const std::string word = "w" + std::to_string(t);
                    std::string prompt;
                    for (int k = 0; k < i % 4; ++k) {
                        prompt += word + " ";
                    }
                    const auto r = remote.score_candidates({prompt, {}, {word}});
                    if (r.find(word).logprobs == std::vector<double>{-5.0 + 0.5 * (i % 4)}) {
                        ++good;
                    }
                }
            });
        }
    }
    EXPECT_EQ(good, 120);
    server.stop();
}

TEST(RemoteBackend, ServerErrorsMapToClientErrors) {
    LineServer busy(std::make_shared<FailingBackend>(icc::ErrorCode::BackendUnavailable), local(0));
    busy.start();
    RemoteBackend to_busy(local(busy.port()));
    EXPECT_EQ(code_of([&] { to_busy.score({"x", {}, {"a"}}); }), icc::ErrorCode::BackendUnavailable);
    busy.stop();

    LineServer broken(std::make_shared<FailingBackend>(icc::ErrorCode::BackendError), local(0));
    broken.start();
    RemoteBackend to_broken(local(broken.port()));
    EXPECT_EQ(code_of([&] { to_broken.generate({"x", {}, 5, 1.0}); }), icc::ErrorCode::BackendError);
    broken.stop();
}

TEST(RemoteBackend, TimeoutReportsElapsedTime) {
    SilentListener silent;
    icc::RemoteOptions options;
    options.timeout = std::chrono::milliseconds(150);
    RemoteBackend backend(local(silent.port()), options);
    const auto start = std::chrono::steady_clock::now();
    try {
        backend.score({"x", {}, {"a"}});
        FAIL() << "expected a timeout";
    } catch (const icc::Error& e) {
        EXPECT_EQ(e.code(), icc::ErrorCode::BackendUnavailable);
        EXPECT_NE(std::string(e.what()).find(" ms"), std::string::npos) << e.what();
    }
    EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(150));
}

TEST(RemoteBackend, RefusedConnectionIsUnavailableAfterRetries) {
    std::uint16_t port = 0;
    {
        SilentListener probe;
        port = probe.port();
    }
    icc::RemoteOptions options;
    options.retry_backoff = std::chrono::milliseconds(1);
    RemoteBackend backend(local(port), options);
    try {
        backend.score({"x", {}, {"a"}});
        FAIL();
    } catch (const icc::Error& e) {
        EXPECT_EQ(e.code(), icc::ErrorCode::BackendUnavailable);
        EXPECT_NE(std::string(e.what()).find("3 attempts"), std::string::npos) << e.what();
    }
}

TEST(RemoteBackend, UnixSocketEndpoint) {
    icc::fixtures::TempDir dir;
    const auto ep = Endpoint::parse("unix:" + (dir / "s.sock").string());
    LineServer server(std::make_shared<icc::SyntheticBackend>(), ep);
    server.start();
    RemoteBackend backend(ep);
    EXPECT_EQ(backend.score({"bull", {}, {"bull"}}).find("bull").logprobs, (std::vector<double>{-4.5}));
    server.stop();
}

TEST(LineServer, ConformanceSuiteOverTcp) {
    LineServer server(std::make_shared<icc::SyntheticBackend>(), local(0));
    server.start();
    RawClient client(server.port());
    const auto cases = icc::fixtures::load_conformance_cases(std::string(ICC_CONFORMANCE_DIR) + "/requests.jsonl");
    for (const auto& f : icc::fixtures::run_conformance(cases, [&](const std::string& l) { return client.exchange(l); })) {
        ADD_FAILURE() << f;
    }
    server.stop();
}
