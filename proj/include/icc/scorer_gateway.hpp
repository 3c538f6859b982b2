#pragma once

#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

namespace icc {

struct ScoreRequest {
    std::string prompt;
    std::vector<std::string> images;
    std::vector<std::string> candidates;
};

struct CandidateResult {
    std::string candidate;
    std::vector<std::string> tokens;
    std::vector<double> logprobs;

    bool operator==(const CandidateResult&) const = default;
};

struct ScoreResponse {
    std::vector<CandidateResult> results;

    const CandidateResult& find(const std::string& candidate) const;
    bool operator==(const ScoreResponse&) const = default;
};

struct GenerateRequest {
    std::string prompt;
    std::vector<std::string> images;
    int max_new_tokens = 20;
    double length_penalty = 1.0;
};

struct GenerateResponse {
    std::string text;
};

struct EmbedItem {
    std::string id;
    std::string kind; // "image" | "label"
    std::string value; // image path or label text
};

struct EmbedRequest {
    std::vector<EmbedItem> items;
};

struct EmbedResponse {
    std::vector<std::vector<float>> vectors;
};

// Anything that answers the wire operations: the in-process synthetic model,
// or a remote server reached over a socket.
class Backend {
public:
    virtual ~Backend() = default;

    virtual ScoreResponse score(const ScoreRequest& req) = 0;
    virtual GenerateResponse generate(const GenerateRequest& req) = 0;
    virtual EmbedResponse embed(const EmbedRequest& req);
    virtual std::string fingerprint() const = 0;
};

void validate_score_request(const ScoreRequest& req, const std::string& image_marker);
void validate_score_response(const ScoreRequest& req, const ScoreResponse& resp);
void validate_generate_response(const GenerateRequest& req, const GenerateResponse& resp);

std::size_t count_whitespace_tokens(const std::string& text);

// Contract-checking front for a backend. Requests are never modified;
// responses are validated before they are returned.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Backend> backend, std::string image_marker = "<image>");

    ScoreResponse score_candidates(const ScoreRequest& req) const;
    GenerateResponse generate(const GenerateRequest& req) const;
    EmbedResponse embed(const EmbedRequest& req) const;

    std::string fingerprint() const { return backend_->fingerprint(); }
    const std::string& image_marker() const { return image_marker_; }

    // Request/response pairs are appended as JSON lines when set.
    void set_audit_log(std::ostream* out) { audit_ = out; }

private:
    void audit(const std::string& request_line, const std::string& response_line) const;

    std::shared_ptr<Backend> backend_;
    std::string image_marker_;
    std::ostream* audit_ = nullptr;
    mutable std::mutex audit_mutex_;
};

} // namespace icc
