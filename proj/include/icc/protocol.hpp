#pragma once

#include <string>

#include <json.hpp>

#include "icc/scorer_gateway.hpp"

namespace icc {
class Backend;
}

// Line-delimited JSON messages exchanged with model backends.
namespace icc::protocol {

using Json = nlohmann::json;

std::string encode(const std::string& id, const ScoreRequest& req);
std::string encode(const std::string& id, const GenerateRequest& req);
std::string encode(const std::string& id, const EmbedRequest& req);

std::string encode_ok(const std::string& id, const ScoreResponse& resp);
std::string encode_ok(const std::string& id, const GenerateResponse& resp);
std::string encode_ok(const std::string& id, const EmbedResponse& resp);
std::string encode_error(const std::string& id, const std::string& code, const std::string& message);

// Parses a response line, checks the id, and turns {"ok": false} into an
// exception: "overloaded" -> BackendUnavailable, other codes -> BackendError.
Json parse_response(const std::string& line, const std::string& expected_id);

ScoreResponse decode_score(const Json& body);
GenerateResponse decode_generate(const Json& body);
EmbedResponse decode_embed(const Json& body);

// Server side: decodes one request line, runs it against `backend`, and
// returns the response line (an error object for bad input or failures).
std::string handle_request_line(Backend& backend, const std::string& line);

} // namespace icc::protocol
