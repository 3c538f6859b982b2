#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icc {

// Brace-placeholder templates: "{name}" is substituted, "{{" and "}}" are
// literal braces. An unresolved name raises InvalidArgument.
using PlaceholderLookup = std::function<std::optional<std::string>(std::string_view)>;

std::string render_template(std::string_view tmpl, const PlaceholderLookup& lookup);

std::vector<std::string> placeholders(std::string_view tmpl);

bool has_placeholder(std::string_view tmpl, std::string_view name);

// TemplateMissingPlaceholder unless every name in `required` occurs.
void require_placeholders(std::string_view tmpl, std::initializer_list<std::string_view> required,
                          std::string_view what);

} // namespace icc
