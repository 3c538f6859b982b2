#include "icc/protocol.hpp"

#include <cmath>

#include "icc/error.hpp"
#include "icc/jsonl.hpp"

namespace icc::protocol {

namespace {

using OJson = nlohmann::ordered_json;

[[noreturn]] void violation(const std::string& what) {
    raise(ErrorCode::ProtocolViolation, what);
}

std::vector<std::string> string_list(const Json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
        violation(std::string("'") + key + "' must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) {
            violation(std::string("'") + key + "' must be an array of strings");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string string_field(const Json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        violation(std::string("'") + key + "' must be a string");
    }
    return it->get<std::string>();
}

void only_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
               std::initializer_list<std::string_view> required) {
    jsonl::check_keys(obj, allowed, required, ErrorCode::ProtocolViolation, "message");
}

} // namespace

std::string encode(const std::string& id, const ScoreRequest& req) {
    OJson j;
    j["id"] = id;
    j["op"] = "score";
    j["prompt"] = req.prompt;
    j["images"] = req.images;
    j["candidates"] = req.candidates;
    return j.dump();
}

std::string encode(const std::string& id, const GenerateRequest& req) {
    OJson j;
    j["id"] = id;
    j["op"] = "generate";
    j["prompt"] = req.prompt;
    j["images"] = req.images;
    j["max_new_tokens"] = req.max_new_tokens;
    j["length_penalty"] = req.length_penalty;
    return j.dump();
}

std::string encode(const std::string& id, const EmbedRequest& req) {
    OJson j;
    j["id"] = id;
    j["op"] = "embed";
    j["items"] = OJson::array();
    for (const auto& item : req.items) {
        j["items"].push_back(OJson{{"id", item.id}, {"kind", item.kind}, {"value", item.value}});
    }
    return j.dump();
}

std::string encode_ok(const std::string& id, const ScoreResponse& resp) {
    OJson j;
    j["id"] = id;
    j["ok"] = true;
    j["results"] = OJson::array();
    for (const auto& r : resp.results) {
        j["results"].push_back(OJson{{"candidate", r.candidate}, {"tokens", r.tokens}, {"logprobs", r.logprobs}});
    }
    return j.dump();
}

std::string encode_ok(const std::string& id, const GenerateResponse& resp) {
    OJson j;
    j["id"] = id;
    j["ok"] = true;
    j["text"] = resp.text;
    return j.dump();
}

std::string encode_ok(const std::string& id, const EmbedResponse& resp) {
    OJson j;
    j["id"] = id;
    j["ok"] = true;
    j["vectors"] = resp.vectors;
    return j.dump();
}

std::string encode_error(const std::string& id, const std::string& code, const std::string& message) {
    OJson j;
    j["id"] = id;
    j["ok"] = false;
    j["error"] = OJson{{"code", code}, {"message", message}};
    return j.dump();
}

Json parse_response(const std::string& line, const std::string& expected_id) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        violation(std::string("response is not JSON: ") + e.what());
    }
    if (!j.is_object()) {
        violation("response is not an object");
    }
    if (string_field(j, "id") != expected_id) {
        violation("response id '" + j["id"].get<std::string>() + "' does not match request '" + expected_id + "'");
    }
    auto ok = j.find("ok");
    if (ok == j.end() || !ok->is_boolean()) {
        violation("response lacks boolean 'ok'");
    }
    if (!ok->get<bool>()) {
        auto err = j.find("error");
        if (err == j.end() || !err->is_object()) {
            violation("error response lacks 'error' object");
        }
        const auto code = string_field(*err, "code");
        const auto message = err->contains("message") && (*err)["message"].is_string()
                                 ? (*err)["message"].get<std::string>()
                                 : std::string();
        if (code == "overloaded") {
            raise(ErrorCode::BackendUnavailable, "backend overloaded: " + message);
        }
        if (code != "bad_request" && code != "model_error") {
            violation("unknown error code '" + code + "'");
        }
        raise(ErrorCode::BackendError, code + ": " + message);
    }
    return j;
}

ScoreResponse decode_score(const Json& body) {
    only_keys(body, {"id", "ok", "results"}, {"id", "ok", "results"});
    const auto& results = body["results"];
    if (!results.is_array()) {
        violation("'results' must be an array");
    }
    ScoreResponse resp;
    for (const auto& r : results) {
        if (!r.is_object()) {
            violation("result entries must be objects");
        }
        only_keys(r, {"candidate", "tokens", "logprobs"}, {"candidate", "tokens", "logprobs"});
        CandidateResult cr;
        cr.candidate = string_field(r, "candidate");
        cr.tokens = string_list(r, "tokens");
        if (!r["logprobs"].is_array()) {
            violation("'logprobs' must be an array of numbers");
        }
        for (const auto& v : r["logprobs"]) {
            if (!v.is_number()) {
                violation("'logprobs' must be an array of numbers");
            }
            cr.logprobs.push_back(v.get<double>());
        }
        resp.results.push_back(std::move(cr));
    }
    return resp;
}

GenerateResponse decode_generate(const Json& body) {
    only_keys(body, {"id", "ok", "text"}, {"id", "ok", "text"});
    return {string_field(body, "text")};
}

EmbedResponse decode_embed(const Json& body) {
    only_keys(body, {"id", "ok", "vectors"}, {"id", "ok", "vectors"});
    const auto& vectors = body["vectors"];
    if (!vectors.is_array()) {
        violation("'vectors' must be an array");
    }
    EmbedResponse resp;
    for (const auto& v : vectors) {
        if (!v.is_array()) {
            violation("each vector must be an array of numbers");
        }
        std::vector<float> row;
        for (const auto& x : v) {
            if (!x.is_number()) {
                violation("each vector must be an array of numbers");
            }
            row.push_back(x.get<float>());
        }
        resp.vectors.push_back(std::move(row));
    }
    return resp;
}

std::string handle_request_line(Backend& backend, const std::string& line) {
    std::string id;
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        return encode_error(id, "bad_request", std::string("not JSON: ") + e.what());
    }
    if (!j.is_object()) {
        return encode_error(id, "bad_request", "message is not an object");
    }
    if (auto it = j.find("id"); it != j.end() && it->is_string()) {
        id = it->get<std::string>();
    }
    std::string op;
    try {
        op = string_field(j, "op");
        string_field(j, "id");
        if (op == "score") {
            only_keys(j, {"id", "op", "prompt", "images", "candidates"}, {"id", "op", "prompt", "images", "candidates"});
            ScoreRequest req{string_field(j, "prompt"), string_list(j, "images"), string_list(j, "candidates")};
            if (req.candidates.empty()) {
                violation("'candidates' must be non-empty");
            }
            return encode_ok(id, backend.score(req));
        }
        if (op == "generate") {
            only_keys(j, {"id", "op", "prompt", "images", "max_new_tokens", "length_penalty"},
                      {"id", "op", "prompt", "images"});
            GenerateRequest req;
            req.prompt = string_field(j, "prompt");
            req.images = string_list(j, "images");
            if (j.contains("max_new_tokens")) {
                if (!j["max_new_tokens"].is_number_integer() || j["max_new_tokens"].get<int>() < 0) {
                    violation("'max_new_tokens' must be a non-negative integer");
                }
                req.max_new_tokens = j["max_new_tokens"].get<int>();
            }
            if (j.contains("length_penalty")) {
                if (!j["length_penalty"].is_number()) {
                    violation("'length_penalty' must be a number");
                }
                req.length_penalty = j["length_penalty"].get<double>();
            }
            return encode_ok(id, backend.generate(req));
        }
        if (op == "embed") {
            only_keys(j, {"id", "op", "items"}, {"id", "op", "items"});
            if (!j["items"].is_array()) {
                violation("'items' must be an array");
            }
            EmbedRequest req;
            for (const auto& item : j["items"]) {
                if (!item.is_object()) {
                    violation("embed items must be objects");
                }
                only_keys(item, {"id", "kind", "value"}, {"id", "kind", "value"});
                EmbedItem e{string_field(item, "id"), string_field(item, "kind"), string_field(item, "value")};
                if (e.kind != "image" && e.kind != "label") {
                    violation("embed kind must be 'image' or 'label'");
                }
                req.items.push_back(std::move(e));
            }
            return encode_ok(id, backend.embed(req));
        }
        violation("unknown op '" + op + "'");
    } catch (const Error& e) {
        const bool client_fault = e.code() == ErrorCode::ProtocolViolation || e.code() == ErrorCode::InvalidArgument;
        if (e.code() == ErrorCode::BackendUnavailable) {
            return encode_error(id, "overloaded", e.what());
        }
        return encode_error(id, client_fault ? "bad_request" : "model_error", e.what());
    } catch (const std::exception& e) {
        return encode_error(id, "model_error", e.what());
    }
}

} // namespace icc::protocol
