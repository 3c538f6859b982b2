#include "icc/text_template.hpp"

#include <algorithm>

#include "icc/error.hpp"

namespace icc {

namespace {

template <typename OnText, typename OnName>
void scan(std::string_view tmpl, OnText on_text, OnName on_name) {
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const char c = tmpl[i];
        if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
            on_text("{");
            i += 2;
        } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
            on_text("}");
            i += 2;
        } else if (c == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close == std::string_view::npos) {
                raise(ErrorCode::InvalidArgument, "unterminated placeholder in template '" +
                                                      std::string(tmpl) + "'");
            }
            on_name(tmpl.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            const auto next = tmpl.find_first_of("{}", i + 1);
            const auto end = next == std::string_view::npos ? tmpl.size() : next;
            on_text(tmpl.substr(i, end - i));
            i = end;
        }
    }
}

} // namespace

std::string render_template(std::string_view tmpl, const PlaceholderLookup& lookup) {
    std::string out;
    scan(
        tmpl, [&](std::string_view text) { out.append(text); },
        [&](std::string_view name) {
            auto value = lookup(name);
            if (!value) {
                raise(ErrorCode::InvalidArgument, "template placeholder '{" + std::string(name) +
                                                      "}' has no value");
            }
            out.append(*value);
        });
    return out;
}

std::vector<std::string> placeholders(std::string_view tmpl) {
    std::vector<std::string> names;
    scan(tmpl, [](std::string_view) {}, [&](std::string_view name) { names.emplace_back(name); });
    return names;
}

bool has_placeholder(std::string_view tmpl, std::string_view name) {
    const auto names = placeholders(tmpl);
    return std::find(names.begin(), names.end(), name) != names.end();
}

void require_placeholders(std::string_view tmpl, std::initializer_list<std::string_view> required,
                          std::string_view what) {
    for (auto name : required) {
        if (!has_placeholder(tmpl, name)) {
            raise(ErrorCode::TemplateMissingPlaceholder,
                  std::string(what) + " template lacks '{" + std::string(name) + "}'");
        }
    }
}

} // namespace icc
