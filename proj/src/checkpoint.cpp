#include <json.hpp>

#include "ctxsal/csv.hpp"
#include "ctxsal/error.hpp"
#include "ctxsal/model.hpp"

namespace ctxsal {

using nlohmann::json;

namespace {

constexpr const char* kCheckpointVersion = "v1";

json hyper_to_json(const ModelConfig& c) {
  switch (c.arch) {
    case Architecture::kLinear:
      return json::object();
    case Architecture::kMlp:
      return {{"hidden", c.hidden}};
    case Architecture::kConvNet:
      return {{"hidden", c.hidden},
              {"filters", c.filters},
              {"kernel", c.kernel},
              {"group_size", c.group_size},
              {"pool", c.pool}};
  }
  return json::object();
}

}  // namespace

std::string checkpoint_to_json(const DifferentiableModel& model) {
  json j;
  j["version"] = kCheckpointVersion;
  j["arch"] = architecture_tag(model.architecture());
  j["ch"] = model.shape().channels;
  j["t"] = model.shape().timesteps;
  j["num_classes"] = model.shape().num_classes;
  j["hyper"] = hyper_to_json(model.config());
  j["params"] = std::vector<double>(model.parameters().begin(), model.parameters().end());
  return j.dump() + "\n";
}

std::unique_ptr<DifferentiableModel> checkpoint_from_json(std::string_view text,
                                                          const std::string& source,
                                                          std::optional<Architecture> expected) {
  try {
    const json j = json::parse(text);
    const auto version = j.at("version").get<std::string>();
    if (version != kCheckpointVersion) {
      throw FormatError(source + ": unsupported checkpoint version '" + version + "'");
    }
    ModelConfig config;
    config.arch = parse_architecture(j.at("arch").get<std::string>());
    if (expected && *expected != config.arch) {
      throw FormatError(source + ": checkpoint holds a '" + architecture_tag(config.arch) +
                        "' model, expected '" + architecture_tag(*expected) + "'");
    }
    const json& hyper = j.at("hyper");
    config.hidden = hyper.value("hidden", config.hidden);
    config.filters = hyper.value("filters", config.filters);
    config.kernel = hyper.value("kernel", config.kernel);
    config.group_size = hyper.value("group_size", config.group_size);
    config.pool = hyper.value("pool", config.pool);

    ModelShape shape;
    shape.channels = j.at("ch").get<std::size_t>();
    shape.timesteps = j.at("t").get<std::size_t>();
    shape.num_classes = j.at("num_classes").get<std::size_t>();
    auto params = j.at("params").get<std::vector<double>>();
    const std::size_t want = parameter_count(config, shape);
    if (params.size() != want) {
      throw FormatError(source + ": parameter count " + std::to_string(params.size()) +
                        " does not match " + architecture_tag(config.arch) + " (" +
                        std::to_string(want) + ")");
    }
    return make_model(config, shape, std::move(params));
  } catch (const json::exception& e) {
    throw FormatError(source + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(source + ": " + e.what());
  }
}

void save_checkpoint(const DifferentiableModel& model, const std::filesystem::path& path) {
  write_text_file(path, checkpoint_to_json(model));
}

std::unique_ptr<DifferentiableModel> load_checkpoint(const std::filesystem::path& path,
                                                     std::optional<Architecture> expected) {
  return checkpoint_from_json(read_text_file(path), path.string(), expected);
}

}  // namespace ctxsal
