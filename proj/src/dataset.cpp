#include "ctxsal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <json.hpp>

#include "ctxsal/csv.hpp"
#include "ctxsal/error.hpp"

namespace ctxsal {

using nlohmann::json;

void PlantSpec::validate(std::size_t channels, std::size_t timesteps) const {
  if (planted_channels.empty()) throw InvalidArgument("plant: no planted channels");
  std::set<std::size_t> seen;
  for (std::size_t ch : planted_channels) {
    if (ch >= channels) {
      throw InvalidArgument("plant: channel " + std::to_string(ch) + " outside [0, " +
                            std::to_string(channels) + ")");
    }
    if (!seen.insert(ch).second) {
      throw InvalidArgument("plant: duplicate channel " + std::to_string(ch));
    }
  }
  if (!(t_start < t_end && t_end <= timesteps && window_jitter <= timesteps - t_end)) {
    throw InvalidArgument("plant: window [" + std::to_string(t_start) + ", " +
                          std::to_string(t_end) + ") with jitter " +
                          std::to_string(window_jitter) + " invalid for " +
                          std::to_string(timesteps) + " time steps");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw InvalidArgument("plant: noise_std must be finite and >= 0");
  }
  if (!std::isfinite(pattern_amplitude)) throw InvalidArgument("plant: amplitude not finite");
  if (!std::isfinite(phase_step)) throw InvalidArgument("plant: phase_step not finite");
  if (carrier_period < 2) throw InvalidArgument("plant: carrier period must be >= 2");
  if (active_count > planted_channels.size()) {
    throw InvalidArgument("plant: active_count exceeds the number of planted channels");
  }
  if (asymmetry_pair) {
    const auto [a, b] = *asymmetry_pair;
    if (a == b) throw InvalidArgument("plant: asymmetry pair needs two distinct channels");
    if (!seen.contains(a) || !seen.contains(b)) {
      throw InvalidArgument("plant: asymmetry pair must be among the planted channels");
    }
  }
}

PlantSpec PlantSpec::channel_benchmark(std::size_t channels, std::size_t timesteps) {
  PlantSpec spec;
  if (channels < 4) {
    for (std::size_t ch = 0; ch < channels; ++ch) spec.planted_channels.push_back(ch);
    if (channels >= 2) spec.asymmetry_pair = std::make_pair(std::size_t{0}, std::size_t{1});
  } else {
    for (std::size_t i = 0; i < 4; ++i) spec.planted_channels.push_back((2 * i + 1) * channels / 8);
    spec.asymmetry_pair = std::make_pair(spec.planted_channels[1], spec.planted_channels[2]);
    spec.active_count = 2;
  }
  spec.t_start = timesteps / 4;
  spec.t_end = spec.t_start + std::max<std::size_t>(1, timesteps / 2);
  return spec;
}

PlantSpec PlantSpec::timestep_benchmark(std::size_t channels, std::size_t timesteps) {
  PlantSpec spec;
  for (std::size_t ch = 0; ch < channels; ++ch) spec.planted_channels.push_back(ch);
  spec.phase_step = std::numbers::pi / 2.0;
  spec.t_start = 0;
  spec.t_end = std::min<std::size_t>(64, timesteps);
  spec.window_jitter = timesteps - spec.t_end;
  return spec;
}

const char* split_name(Split s) { return s == Split::kTrain ? "train" : "test"; }

std::vector<const LabeledSample*> DatasetManifest::subset(Split s) const {
  std::vector<const LabeledSample*> out;
  for (const auto& sample : samples) {
    if (sample.split == s) out.push_back(&sample);
  }
  return out;
}

EegMatrix planted_pattern(const PlantSpec& spec, std::size_t label, std::size_t num_classes,
                          std::size_t channels, std::size_t timesteps) {
  return planted_pattern(spec, label, num_classes, channels, timesteps,
                         PlantedRegion{spec.planted_channels, spec.t_start, spec.t_end});
}

EegMatrix planted_pattern(const PlantSpec& spec, std::size_t label, std::size_t num_classes,
                          std::size_t channels, std::size_t timesteps,
                          const PlantedRegion& region) {
  EegMatrix out(channels, timesteps);
  // Magnitude grows with the class index and polarity alternates, so two
  // classes differ in sign as well as size.
  const double polarity = label % 2 == 1 ? -1.0 : 1.0;
  const double amp = polarity * spec.pattern_amplitude * static_cast<double>(label + 1) /
                     static_cast<double>(num_classes);
  const double omega = 2.0 * std::numbers::pi / static_cast<double>(spec.carrier_period);
  for (std::size_t ch : region.channels) {
    double sign = 1.0;
    if (spec.asymmetry_pair && ch == spec.asymmetry_pair->second && label % 2 == 1) sign = -1.0;
    const double phase = spec.phase_step * static_cast<double>(ch);
    for (std::size_t t = region.t_start; t < region.t_end; ++t) {
      out(ch, t) = sign * amp * std::sin(omega * static_cast<double>(t - region.t_start) + phase);
    }
  }
  return out;
}

namespace {

// Partial Fisher-Yates with plain modulo so the draw does not depend on the
// standard library's distribution implementations.
std::vector<std::size_t> draw_active(const PlantSpec& spec, std::mt19937_64& rng) {
  std::vector<std::size_t> pool = spec.planted_channels;
  for (std::size_t i = 0; i < spec.active_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(spec.active_count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

PlantedRegion draw_region(const PlantSpec& spec, std::mt19937_64& rng) {
  PlantedRegion r{spec.active_count == 0 ? spec.planted_channels : draw_active(spec, rng),
                  spec.t_start, spec.t_end};
  if (spec.window_jitter > 0) {
    const std::size_t shifts = spec.window_jitter / spec.carrier_period;
    const std::size_t offset = spec.carrier_period * static_cast<std::size_t>(rng() % (shifts + 1));
    r.t_start += offset;
    r.t_end += offset;
  }
  return r;
}

}  // namespace

DatasetManifest generate_synthetic(const PlantSpec& spec, const GeneratorOptions& opts) {
  if (opts.num_classes < 2) throw InvalidArgument("generate_synthetic: need at least 2 classes");
  if (opts.samples_per_class == 0) {
    throw InvalidArgument("generate_synthetic: samples_per_class must be positive");
  }
  if (!(opts.test_fraction >= 0.0 && opts.test_fraction < 1.0)) {
    throw InvalidArgument("generate_synthetic: test_fraction must be in [0, 1)");
  }
  if (opts.channels == 0 || opts.timesteps == 0) {
    throw InvalidArgument("generate_synthetic: shape must be at least 1x1");
  }
  spec.validate(opts.channels, opts.timesteps);

  const auto n_test = static_cast<std::size_t>(
      std::floor(opts.test_fraction * static_cast<double>(opts.samples_per_class)));
  const std::size_t n_train = opts.samples_per_class - n_test;

  DatasetManifest m;
  m.num_classes = opts.num_classes;
  m.channels = opts.channels;
  m.timesteps = opts.timesteps;
  m.seed = opts.seed;
  m.plant = spec;

  std::size_t train_idx = 0;
  std::size_t test_idx = 0;
  for (Split split : {Split::kTrain, Split::kTest}) {
    const std::size_t begin = split == Split::kTrain ? 0 : n_train;
    const std::size_t end = split == Split::kTrain ? n_train : opts.samples_per_class;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t c = 0; c < opts.num_classes; ++c) {
        std::seed_seq seq{static_cast<std::uint32_t>(opts.seed),
                          static_cast<std::uint32_t>(opts.seed >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        PlantedRegion region = draw_region(spec, rng);
        EegMatrix x =
            planted_pattern(spec, c, opts.num_classes, opts.channels, opts.timesteps, region);
        if (spec.noise_std > 0.0) {
          std::normal_distribution<double> noise(0.0, spec.noise_std);
          for (double& v : x.values()) v += noise(rng);
        }
        std::size_t& counter = split == Split::kTrain ? train_idx : test_idx;
        char name[64];
        std::snprintf(name, sizeof(name), "samples/%s_%05zu.csv", split_name(split), counter++);
        m.samples.push_back(LabeledSample{std::move(x), c, split, name, std::move(region)});
      }
    }
  }
  return m;
}

namespace {

json plant_to_json(const PlantSpec& p) {
  json j;
  j["planted_channels"] = p.planted_channels;
  j["window"] = {p.t_start, p.t_end};
  j["pattern_amplitude"] = p.pattern_amplitude;
  j["noise_std"] = p.noise_std;
  j["carrier_period"] = p.carrier_period;
  j["active_count"] = p.active_count;
  j["window_jitter"] = p.window_jitter;
  j["phase_step"] = p.phase_step;
  if (p.asymmetry_pair) {
    j["asymmetry_pair"] = {p.asymmetry_pair->first, p.asymmetry_pair->second};
  } else {
    j["asymmetry_pair"] = nullptr;
  }
  return j;
}

PlantSpec plant_from_json(const json& j) {
  PlantSpec p;
  p.planted_channels = j.at("planted_channels").get<std::vector<std::size_t>>();
  const auto window = j.at("window").get<std::vector<std::size_t>>();
  if (window.size() != 2) throw FormatError("plant.window must have two entries");
  p.t_start = window[0];
  p.t_end = window[1];
  p.pattern_amplitude = j.at("pattern_amplitude").get<double>();
  p.noise_std = j.at("noise_std").get<double>();
  p.carrier_period = j.value("carrier_period", std::size_t{6});
  p.active_count = j.value("active_count", std::size_t{0});
  p.window_jitter = j.value("window_jitter", std::size_t{0});
  p.phase_step = j.value("phase_step", 0.0);
  if (j.contains("asymmetry_pair") && !j.at("asymmetry_pair").is_null()) {
    const auto pair = j.at("asymmetry_pair").get<std::vector<std::size_t>>();
    if (pair.size() != 2) throw FormatError("plant.asymmetry_pair must have two entries");
    p.asymmetry_pair = std::make_pair(pair[0], pair[1]);
  }
  return p;
}

}  // namespace

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  const auto dir = path.parent_path();
  json j;
  j["version"] = manifest.version;
  j["num_classes"] = manifest.num_classes;
  j["channels"] = manifest.channels;
  j["timesteps"] = manifest.timesteps;
  j["seed"] = manifest.seed;
  j["plant"] = manifest.plant ? plant_to_json(*manifest.plant) : json(nullptr);
  json entries = json::array();
  for (const auto& s : manifest.samples) {
    if (s.file.empty()) throw InvalidArgument("save_manifest: sample without file name");
    write_matrix_csv(dir / s.file, s.x);
    json entry{{"file", s.file}, {"label", s.label}, {"split", split_name(s.split)}};
    if (s.truth) {
      entry["truth"] = {{"channels", s.truth->channels},
                        {"window", {s.truth->t_start, s.truth->t_end}}};
    }
    entries.push_back(std::move(entry));
  }
  j["samples"] = std::move(entries);
  write_text_file(path, j.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw FormatError("manifest not found: " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.version = j.at("version").get<std::string>();
    if (m.version != "v1") {
      throw FormatError(path.string() + ": unsupported manifest version '" + m.version + "'");
    }
    m.num_classes = j.at("num_classes").get<std::size_t>();
    m.channels = j.at("channels").get<std::size_t>();
    m.timesteps = j.at("timesteps").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("plant").is_null()) m.plant = plant_from_json(j.at("plant"));

    const auto dir = path.parent_path();
    std::vector<std::string> missing;
    for (const auto& e : j.at("samples")) {
      const auto file = e.at("file").get<std::string>();
      if (!std::filesystem::exists(dir / file)) missing.push_back((dir / file).string());
    }
    if (!missing.empty()) {
      std::string msg = path.string() + ": missing sample files:";
      for (const auto& f : missing) msg += " " + f;
      throw FormatError(msg);
    }
    for (const auto& e : j.at("samples")) {
      const auto file = e.at("file").get<std::string>();
      const auto label = e.at("label").get<std::size_t>();
      const auto split_str = e.at("split").get<std::string>();
      if (split_str != "train" && split_str != "test") {
        throw FormatError(path.string() + ": bad split '" + split_str + "' for " + file);
      }
      if (label >= m.num_classes) {
        throw FormatError(path.string() + ": label " + std::to_string(label) + " of " + file +
                          " exceeds num_classes");
      }
      EegMatrix x = read_matrix_csv(dir / file);
      if (x.channels() != m.channels || x.timesteps() != m.timesteps) {
        throw FormatError((dir / file).string() + ": shape " + std::to_string(x.channels()) +
                          "x" + std::to_string(x.timesteps()) + " does not match manifest " +
                          std::to_string(m.channels) + "x" + std::to_string(m.timesteps));
      }
      std::optional<PlantedRegion> truth;
      if (e.contains("truth")) {
        const auto& t = e.at("truth");
        const auto window = t.at("window").get<std::vector<std::size_t>>();
        if (window.size() != 2) throw FormatError(path.string() + ": bad truth window for " + file);
        truth = PlantedRegion{t.at("channels").get<std::vector<std::size_t>>(), window[0],
                              window[1]};
        bool ok = truth->t_start < truth->t_end && truth->t_end <= m.timesteps;
        for (std::size_t ch : truth->channels) ok = ok && ch < m.channels;
        if (!ok) throw FormatError(path.string() + ": truth region of " + file + " out of range");
      }
      m.samples.push_back(LabeledSample{std::move(x), label,
                                        split_str == "train" ? Split::kTrain : Split::kTest, file,
                                        std::move(truth)});
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return m;
}

}  // namespace ctxsal
