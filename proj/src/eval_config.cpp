#include "icc/eval_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "icc/error.hpp"
#include "icc/jsonl.hpp"
#include "icc/text_template.hpp"

namespace icc {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::SL: return "SL";
    case Strategy::LdeEL: return "LDE-EL";
    case Strategy::LdeDL: return "LDE-DL";
    case Strategy::LdeDD: return "LDE-DD";
    case Strategy::VDE: return "VDE";
    case Strategy::ENS: return "ENS";
    }
    return "SL";
}

std::string_view to_string(Selector s) {
    return s == Selector::RS ? "RS" : "RICES";
}

Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::SL, Strategy::LdeEL, Strategy::LdeDL, Strategy::LdeDD, Strategy::VDE, Strategy::ENS}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    raise(ErrorCode::ConfigInvalid, "unknown strategy '" + std::string(name) + "'");
}

Selector parse_selector(std::string_view name) {
    if (name == "RS") return Selector::RS;
    if (name == "RICES") return Selector::RICES;
    raise(ErrorCode::ConfigInvalid, "unknown selector '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        raise(ErrorCode::ConfigInvalid, "'" + key + "' expects a number, got '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    raise(ErrorCode::ConfigInvalid, "'" + key + "' expects true/false, got '" + value + "'");
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::ConfigInvalid, "cannot open " + path.string());
    }
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

std::map<std::string, std::string> read_description_table(const std::filesystem::path& path) {
    std::map<std::string, std::string> table;
    jsonl::for_each_object(path, ErrorCode::ConfigInvalid, [&](const jsonl::Json& obj, std::size_t line) {
        const auto where = path.string() + ":" + std::to_string(line);
        jsonl::check_keys(obj, {"label", "text"}, {"label", "text"}, ErrorCode::ConfigInvalid, where);
        table[jsonl::get_string(obj, "label", ErrorCode::ConfigInvalid, where)] =
            jsonl::get_string(obj, "text", ErrorCode::ConfigInvalid, where);
    });
    return table;
}

} // namespace

EvalConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
    EvalConfig cfg;
    auto path_of = [&](const std::string& value) {
        std::filesystem::path p(value);
        return p.is_absolute() ? p : base_dir / p;
    };

    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (!value.empty() && value.front() == '"') {
            try {
                value = jsonl::Json::parse(value).get<std::string>();
            } catch (const std::exception& e) {
                raise(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": bad quoted value: " + e.what());
            }
        }
        if (cfg.echo.contains(key)) {
            raise(ErrorCode::ConfigInvalid, "key '" + key + "' set twice");
        }
        cfg.echo[key] = value;

        if (key == "dataset") cfg.dataset = value;
        else if (key == "support_manifest") cfg.support_manifest = path_of(value);
        else if (key == "test_manifest") cfg.test_manifest = path_of(value);
        else if (key == "embeddings_manifest") cfg.embeddings_manifest = path_of(value);
        else if (key == "embeddings_matrix") cfg.embeddings_matrix = path_of(value);
        else if (key == "embeddings") {
            cfg.embeddings_manifest = path_of(value + ".manifest.jsonl");
            cfg.embeddings_matrix = path_of(value + ".emb");
        }
        else if (key == "catalog") cfg.catalog = path_of(value);
        else if (key == "strategy") {
            cfg.strategies.clear();
            for (const auto& s : split_list(value)) cfg.strategies.push_back(parse_strategy(s));
        }
        else if (key == "selector") cfg.selector = parse_selector(value);
        else if (key == "shots") {
            cfg.shots.clear();
            for (const auto& s : split_list(value)) cfg.shots.push_back(parse_number<std::size_t>(key, s));
        }
        else if (key == "max_shots") cfg.max_shots = parse_number<std::size_t>(key, value);
        else if (key == "global_seed") cfg.global_seed = parse_number<std::uint64_t>(key, value);
        else if (key == "temperature") cfg.temperature = parse_number<double>(key, value);
        else if (key == "top_m") cfg.top_m = parse_number<std::size_t>(key, value);
        else if (key == "ice_order") {
            if (value == "ascending") cfg.ice_order = IceOrder::Ascending;
            else if (value == "descending") cfg.ice_order = IceOrder::Descending;
            else raise(ErrorCode::ConfigInvalid, "ice_order must be ascending or descending");
        }
        else if (key == "distribution_reference") {
            if (value == "ice_image") cfg.distribution_reference = DistributionReference::IceImage;
            else if (value == "test_image") cfg.distribution_reference = DistributionReference::TestImage;
            else raise(ErrorCode::ConfigInvalid, "distribution_reference must be ice_image or test_image");
        }
        else if (key == "ensemble_alpha") cfg.ensemble_alpha = parse_number<double>(key, value);
        else if (key == "template_sl") cfg.label_text.sl = value;
        else if (key == "template_el") cfg.label_text.el = value;
        else if (key == "template_dl") cfg.label_text.dl = value;
        else if (key == "template_dd") cfg.label_text.dd = value;
        else if (key == "template_entry") cfg.label_text.entry = value;
        else if (key == "probability_decimals") cfg.label_text.probability_decimals = parse_number<int>(key, value);
        else if (key == "image_marker") cfg.sequence.image_marker = value;
        else if (key == "ice_block") cfg.sequence.ice_block = value;
        else if (key == "description_block") cfg.sequence.description_block = value;
        else if (key == "query_block") cfg.sequence.query_block = value;
        else if (key == "block_separator") cfg.sequence.block_separator = value;
        else if (key == "description_query") cfg.description.prompt.description_query_template = value;
        else if (key == "description_exemplars") cfg.description.prompt.exemplars = read_lines(path_of(value));
        else if (key == "max_generation_tokens") cfg.description.max_generation_tokens = parse_number<int>(key, value);
        else if (key == "length_penalty") cfg.description.length_penalty = parse_number<double>(key, value);
        else if (key == "reference_image_count") cfg.description.reference_image_count = parse_number<std::size_t>(key, value);
        else if (key == "desc_cache") cfg.desc_cache = path_of(value);
        else if (key == "backend") cfg.backend = value;
        else if (key == "synthetic_beta0") cfg.synthetic.beta0 = parse_number<double>(key, value);
        else if (key == "synthetic_beta1") cfg.synthetic.beta1 = parse_number<double>(key, value);
        else if (key == "synthetic_descriptions") cfg.synthetic.description_table = read_description_table(path_of(value));
        else if (key == "synthetic_sentinel") cfg.synthetic.sentinel = value;
        else if (key == "connections") cfg.connections = parse_number<std::size_t>(key, value);
        else if (key == "timeout_ms") cfg.timeout = std::chrono::milliseconds(parse_number<long>(key, value));
        else if (key == "label_embed_template") cfg.label_embed_template = value;
        else if (key == "output") cfg.output = path_of(value);
        else if (key == "skip_errors") cfg.skip_errors = parse_bool(key, value);
        else if (key == "record_timing") cfg.record_timing = parse_bool(key, value);
        else raise(ErrorCode::ConfigInvalid, "unknown key '" + key + "'");
    }
    cfg.description.prompt.dataset = cfg.dataset;
    return cfg;
}

EvalConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::ConfigInvalid, "cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

void validate(const EvalConfig& cfg) {
    auto fail = [](const std::string& why) { raise(ErrorCode::ConfigInvalid, why); };
    for (const auto* p : {&cfg.support_manifest, &cfg.test_manifest, &cfg.embeddings_manifest,
                          &cfg.embeddings_matrix, &cfg.catalog}) {
        if (p->empty()) {
            fail("support_manifest, test_manifest, embeddings (or embeddings_manifest/_matrix) and catalog are required");
        }
    }
    if (cfg.strategies.empty()) fail("no strategy given");
    if (cfg.shots.empty()) fail("no shot count given");
    for (auto n : cfg.shots) {
        if (n > cfg.max_shots) {
            fail("shots " + std::to_string(n) + " exceeds max_shots " + std::to_string(cfg.max_shots));
        }
        if (n == 0) {
            for (auto s : cfg.strategies) {
                if (s != Strategy::SL) {
                    fail("0 shots is only defined for the SL zero-shot baseline");
                }
            }
        }
    }
    auto sorted = cfg.strategies;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail("strategy listed twice");
    auto shots = cfg.shots;
    std::sort(shots.begin(), shots.end());
    if (std::adjacent_find(shots.begin(), shots.end()) != shots.end()) fail("shot count listed twice");
    if (!(cfg.temperature > 0.0)) fail("temperature must be positive");
    if (cfg.top_m == 0) fail("top_m must be at least 1");
    if (!(cfg.ensemble_alpha >= 0.0 && cfg.ensemble_alpha <= 1.0)) fail("ensemble_alpha must lie in [0, 1]");
    if (cfg.label_text.probability_decimals < 0 || cfg.label_text.probability_decimals > 9) {
        fail("probability_decimals must be in [0, 9]");
    }
    if (cfg.description.max_generation_tokens < 0) fail("max_generation_tokens must be non-negative");
    if (cfg.description.reference_image_count == 0) fail("reference_image_count must be at least 1");
    if (cfg.connections == 0) fail("connections must be at least 1");
    if (cfg.sequence.image_marker.empty()) fail("image_marker must be non-empty");
    try {
        require_placeholders(cfg.sequence.ice_block, {"label_text"}, "ice_block");
        require_placeholders(cfg.sequence.description_block, {"label_text", "description"}, "description_block");
        require_placeholders(cfg.description.prompt.description_query_template, {"label"}, "description_query");
        require_placeholders(cfg.label_embed_template, {"label"}, "label_embed_template");
    } catch (const Error& e) {
        fail(e.what());
    }
}

} // namespace icc
