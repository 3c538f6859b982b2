#include "icc/jsonl.hpp"

#include <algorithm>
#include <fstream>

namespace icc::jsonl {

void for_each_object(const std::filesystem::path& path, ErrorCode on_error,
                     const std::function<void(const Json&, std::size_t)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        Json obj;
        try {
            obj = Json::parse(line);
        } catch (const Json::parse_error& e) {
            raise(on_error, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) {
            raise(on_error, path.string() + ":" + std::to_string(line_no) + ": not an object");
        }
        fn(obj, line_no);
    }
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                std::initializer_list<std::string_view> required, ErrorCode on_error,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            raise(on_error, where + ": unknown key '" + key + "'");
        }
    }
    for (auto key : required) {
        if (!obj.contains(key)) {
            raise(on_error, where + ": missing key '" + std::string(key) + "'");
        }
    }
}

std::string get_string(const Json& obj, std::string_view key, ErrorCode on_error,
                       const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        raise(on_error, where + ": '" + std::string(key) + "' must be a string");
    }
    return it->get<std::string>();
}

} // namespace icc::jsonl
