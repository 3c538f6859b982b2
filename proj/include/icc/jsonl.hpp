#pragma once

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "icc/error.hpp"

namespace icc::jsonl {

using Json = nlohmann::json;

// Calls `fn(object, line_number)` for every non-blank line of a UTF-8
// line-delimited JSON file. Lines that do not parse to an object raise
// `on_error` with the file and line in the message.
void for_each_object(const std::filesystem::path& path, ErrorCode on_error,
                     const std::function<void(const Json&, std::size_t)>& fn);

// Rejects keys outside `allowed` and enforces presence of `required`.
void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                std::initializer_list<std::string_view> required, ErrorCode on_error,
                const std::string& where);

std::string get_string(const Json& obj, std::string_view key, ErrorCode on_error,
                       const std::string& where);

} // namespace icc::jsonl
