#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "icc/description_cache.hpp"
#include "icc/error.hpp"
#include "icc/eval_config.hpp"
#include "icc/eval_harness.hpp"
#include "icc/line_server.hpp"
#include "icc/remote_backend.hpp"
#include "icc/report.hpp"
#include "icc/synthetic_backend.hpp"
#include "icc/text_template.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

int exit_code_for(icc::ErrorCode code) {
    using icc::ErrorCode;
    switch (code) {
    case ErrorCode::BackendUnavailable:
    case ErrorCode::BackendError:
    case ErrorCode::ProtocolViolation:
    case ErrorCode::CandidateMissingFromResponse:
    case ErrorCode::EmptyGeneration:
    case ErrorCode::NonFiniteLogProb:
    case ErrorCode::PositiveLogProb:
    case ErrorCode::EmptyTokenList:
        return kExitBackend;
    case ErrorCode::ConfigInvalid:
    case ErrorCode::DisjointnessViolation:
    case ErrorCode::MalformedManifest:
    case ErrorCode::TemplateMissingPlaceholder:
    case ErrorCode::NotEnoughSupport:
    case ErrorCode::UnknownLabel:
        return kExitConfig;
    default:
        return kExitOther;
    }
}

// ICC_BACKEND wins over whatever the config or flags name.
std::string resolve_backend(const std::string& given) {
    if (const char* env = std::getenv("ICC_BACKEND"); env != nullptr && *env != '\0') {
        return env;
    }
    return given;
}

std::shared_ptr<icc::Backend> backend_for(const std::string& spec, const icc::EvalConfig& cfg) {
    auto copy = cfg;
    copy.backend = spec;
    return icc::make_backend(copy);
}

int cmd_eval(const std::string& config_path, bool skip_errors, const std::optional<std::string>& desc_cache) {
    auto cfg = icc::load_config(config_path);
    cfg.backend = resolve_backend(cfg.backend);
    if (skip_errors) {
        cfg.skip_errors = true;
    }
    if (desc_cache) {
        cfg.desc_cache = *desc_cache;
    }
    const auto report = icc::run_eval(cfg);
    std::cout << icc::render_table(report);
    return kExitOk;
}

int cmd_embed(const std::string& backend_spec, const std::string& images, const std::string& labels,
              const std::string& prefix, const std::string& label_template) {
    icc::require_placeholders(label_template, {"label"}, "label template");
    icc::EvalConfig cfg;
    icc::Gateway gateway(backend_for(resolve_backend(backend_spec), cfg));

    const auto split = icc::read_split(images);
    const auto classes = icc::LabelCatalog::read_class_file(labels);

    icc::EmbedRequest req;
    std::vector<icc::EmbeddingRecord> records;
    for (const auto& item : split) {
        req.items.push_back({item.id, "image", item.path.value_or(item.id)});
        records.push_back({item.id, icc::EmbeddingKind::Image, item.label, item.path,
                           static_cast<std::uint32_t>(records.size())});
    }
    for (const auto& label : classes) {
        const auto text = icc::render_template(label_template, [&](std::string_view name) -> std::optional<std::string> {
            if (name == "label") {
                return label;
            }
            return std::nullopt;
        });
        const auto id = "label:" + label;
        req.items.push_back({id, "label", text});
        records.push_back({id, icc::EmbeddingKind::Label, label, std::nullopt,
                           static_cast<std::uint32_t>(records.size())});
    }
    const auto resp = gateway.embed(req);

    const std::size_t dims = resp.vectors.empty() ? 0 : resp.vectors.front().size();
    std::vector<float> matrix;
    matrix.reserve(records.size() * dims);
    for (const auto& v : resp.vectors) {
        matrix.insert(matrix.end(), v.begin(), v.end());
    }
    const auto store = icc::EmbeddingStore::from_rows(std::move(records), dims, std::move(matrix));
    store.save(prefix + ".manifest.jsonl", prefix + ".emb");
    std::cerr << "wrote " << store.size() << " vectors of " << dims << " dims to " << prefix << ".{manifest.jsonl,emb}\n";
    return kExitOk;
}

int cmd_describe(const std::string& config_path, const std::string& labels, const std::string& out) {
    auto cfg = icc::load_config(config_path);
    cfg.backend = resolve_backend(cfg.backend);
    const auto data = icc::load_dataset(cfg);
    icc::Gateway gateway(icc::make_backend(cfg), cfg.sequence.image_marker);
    icc::DescriptionCache cache(out);
    const auto classes = labels.empty() ? data.catalog.classes() : icc::LabelCatalog::read_class_file(labels);
    for (const auto& label : classes) {
        const auto desc =
            cache.get_or_generate(label, data.store, data.catalog, data.support, gateway, cfg.description, cfg.sequence);
        std::cout << label << "\t" << icc::to_string(desc.origin) << "\t" << desc.text << "\n";
    }
    return kExitOk;
}

int cmd_serve_synthetic(const std::string& listen, const std::optional<std::string>& config_path) {
    icc::SyntheticConfig synthetic;
    if (config_path) {
        synthetic = icc::load_config(*config_path).synthetic;
    }
    icc::LineServer server(std::make_shared<icc::SyntheticBackend>(synthetic), icc::Endpoint::parse(listen));
    server.start();
    std::cout << "listening on port " << server.port() << std::endl;
    server.serve_forever();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"In-context image classification toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    bool skip_errors = false;
    std::optional<std::string> desc_cache;
    auto* eval = app.add_subcommand("eval", "Run an evaluation described by a config file");
    eval->add_option("--config", config_path, "key = value config file")->required();
    eval->add_flag("--skip-errors", skip_errors, "Record per-image failures instead of aborting");
    eval->add_option("--desc-cache", desc_cache, "Visual description cache file");

    std::string backend_spec = "synthetic";
    std::string images;
    std::string labels;
    std::string prefix;
    std::string label_template = "{label}";
    auto* embed = app.add_subcommand("embed", "Embed images and labels through a backend");
    embed->add_option("--backend", backend_spec, "Endpoint or 'synthetic'");
    embed->add_option("--images", images, "Image split file")->required();
    embed->add_option("--labels", labels, "Class list, one per line")->required();
    embed->add_option("--out", prefix, "Output prefix")->required();
    embed->add_option("--label-template", label_template, "Text embedded for each label");

    std::string describe_config;
    std::string describe_labels;
    std::string describe_out;
    auto* describe = app.add_subcommand("describe", "Pre-warm the visual description cache");
    describe->add_option("--config", describe_config, "Config naming the store and support split")->required();
    describe->add_option("--labels", describe_labels, "Class list (defaults to the config catalog)");
    describe->add_option("--out", describe_out, "Cache file")->required();

    std::string listen;
    std::optional<std::string> serve_config;
    auto* serve = app.add_subcommand("serve-synthetic", "Serve the synthetic backend over a socket");
    serve->add_option("--listen", listen, "tcp://host:port or unix:/path")->required();
    serve->add_option("--config", serve_config, "Config supplying synthetic_* settings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*eval) {
            return cmd_eval(config_path, skip_errors, desc_cache);
        }
        if (*embed) {
            return cmd_embed(backend_spec, images, labels, prefix, label_template);
        }
        if (*describe) {
            return cmd_describe(describe_config, describe_labels, describe_out);
        }
        if (*serve) {
            return cmd_serve_synthetic(listen, serve_config);
        }
    } catch (const icc::Error& e) {
        std::cerr << "icc: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "icc: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
