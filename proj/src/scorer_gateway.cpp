#include "icc/scorer_gateway.hpp"

#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "icc/error.hpp"
#include "icc/prompt_builder.hpp"
#include "icc/protocol.hpp"

namespace icc {

const CandidateResult& ScoreResponse::find(const std::string& candidate) const {
    for (const auto& r : results) {
        if (r.candidate == candidate) {
            return r;
        }
    }
    raise(ErrorCode::CandidateMissingFromResponse, "no result for candidate '" + candidate + "'");
}

EmbedResponse Backend::embed(const EmbedRequest&) {
    raise(ErrorCode::BackendError, "backend does not support the embed operation");
}

std::size_t count_whitespace_tokens(const std::string& text) {
    std::size_t count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        const bool space = std::isspace(c) != 0;
        if (!space && !in_token) {
            ++count;
        }
        in_token = !space;
    }
    return count;
}

void validate_score_request(const ScoreRequest& req, const std::string& image_marker) {
    const auto markers = find_image_markers(req.prompt, image_marker).size();
    if (markers != req.images.size()) {
        raise(ErrorCode::InvalidArgument, "prompt has " + std::to_string(markers) + " image markers but " +
                                              std::to_string(req.images.size()) + " images were given");
    }
    if (req.candidates.empty()) {
        raise(ErrorCode::EmptyCandidates, "score request without candidates");
    }
    std::unordered_set<std::string> seen;
    for (const auto& c : req.candidates) {
        if (!seen.insert(c).second) {
            raise(ErrorCode::InvalidArgument, "candidate '" + c + "' listed twice");
        }
    }
}

void validate_score_response(const ScoreRequest& req, const ScoreResponse& resp) {
    std::unordered_set<std::string> requested(req.candidates.begin(), req.candidates.end());
    std::unordered_set<std::string> seen;
    for (const auto& r : resp.results) {
        if (!requested.contains(r.candidate)) {
            raise(ErrorCode::ProtocolViolation, "response scores unrequested candidate '" + r.candidate + "'");
        }
        if (!seen.insert(r.candidate).second) {
            raise(ErrorCode::ProtocolViolation, "candidate '" + r.candidate + "' appears twice in response");
        }
        if (r.tokens.size() != r.logprobs.size()) {
            raise(ErrorCode::ProtocolViolation, "tokens and logprobs misaligned for '" + r.candidate + "'");
        }
        for (double lp : r.logprobs) {
            if (!std::isfinite(lp)) {
                raise(ErrorCode::ProtocolViolation, "non-finite logprob for '" + r.candidate + "'");
            }
            if (lp > 0.0) {
                raise(ErrorCode::ProtocolViolation, "positive logprob for '" + r.candidate + "'");
            }
        }
    }
    for (const auto& c : req.candidates) {
        if (!seen.contains(c)) {
            raise(ErrorCode::CandidateMissingFromResponse, "response omits candidate '" + c + "'");
        }
    }
}

void validate_generate_response(const GenerateRequest& req, const GenerateResponse& resp) {
    // Words never outnumber subword tokens, so this is a necessary condition
    // for the backend having honored the budget.
    const auto words = count_whitespace_tokens(resp.text);
    if (req.max_new_tokens >= 0 && words > static_cast<std::size_t>(req.max_new_tokens)) {
        raise(ErrorCode::ProtocolViolation, "completion has " + std::to_string(words) +
                                                " words, budget was " + std::to_string(req.max_new_tokens));
    }
}

Gateway::Gateway(std::shared_ptr<Backend> backend, std::string image_marker)
    : backend_(std::move(backend)), image_marker_(std::move(image_marker)) {
    if (!backend_) {
        raise(ErrorCode::InvalidArgument, "gateway needs a backend");
    }
}

void Gateway::audit(const std::string& request_line, const std::string& response_line) const {
    if (!audit_) {
        return;
    }
    std::lock_guard lock(audit_mutex_);
    *audit_ << request_line << '\n' << response_line << '\n';
}

ScoreResponse Gateway::score_candidates(const ScoreRequest& req) const {
    validate_score_request(req, image_marker_);
    auto resp = backend_->score(req);
    audit(protocol::encode("audit", req), protocol::encode_ok("audit", resp));
    validate_score_response(req, resp);
    return resp;
}

GenerateResponse Gateway::generate(const GenerateRequest& req) const {
    if (req.max_new_tokens < 0) {
        raise(ErrorCode::InvalidArgument, "max_new_tokens must be non-negative");
    }
    const auto markers = find_image_markers(req.prompt, image_marker_).size();
    if (markers != req.images.size()) {
        raise(ErrorCode::InvalidArgument, "prompt has " + std::to_string(markers) + " image markers but " +
                                              std::to_string(req.images.size()) + " images were given");
    }
    auto resp = backend_->generate(req);
    audit(protocol::encode("audit", req), protocol::encode_ok("audit", resp));
    validate_generate_response(req, resp);
    return resp;
}

EmbedResponse Gateway::embed(const EmbedRequest& req) const {
    auto resp = backend_->embed(req);
    if (resp.vectors.size() != req.items.size()) {
        raise(ErrorCode::ProtocolViolation, "embed returned " + std::to_string(resp.vectors.size()) +
                                                " vectors for " + std::to_string(req.items.size()) + " items");
    }
    for (const auto& v : resp.vectors) {
        if (v.empty() || v.size() != resp.vectors.front().size()) {
            raise(ErrorCode::ProtocolViolation, "embed vectors must share a positive dimension");
        }
        for (float x : v) {
            if (!std::isfinite(x)) {
                raise(ErrorCode::ProtocolViolation, "embed vector has a non-finite component");
            }
        }
    }
    return resp;
}

} // namespace icc
