#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxsal/matrix.hpp"

namespace ctxsal {

/// Where and how class information is planted in synthetic samples.
///
/// Inside [t_start, t_end) every planted channel carries a sine burst with
/// amplitude A * (c + 1) / K for class c of K, negated for odd c. For the
/// optional asymmetry pair the second channel's burst flips sign again for odd
/// classes. Everything else is noise.
///
/// With active_count > 0 each sample carries the burst in only that many
/// planted channels, drawn per sample from the seeded stream, so which
/// planted channels matter varies from instance to instance. window_jitter
/// likewise shifts each sample's window right by a random multiple of the
/// carrier period of at most window_jitter steps. phase_step shifts the
/// carrier of channel ch by phase_step * ch radians.
struct PlantSpec {
  std::vector<std::size_t> planted_channels;
  std::size_t t_start = 0;
  std::size_t t_end = 0;
  double pattern_amplitude = 2.0;
  double noise_std = 1.0;
  std::optional<std::pair<std::size_t, std::size_t>> asymmetry_pair;
  std::size_t carrier_period = 6;
  std::size_t active_count = 0;  // 0: every planted channel in every sample
  std::size_t window_jitter = 0;
  double phase_step = 0.0;

  // Throws InvalidArgument when indices or the (jittered) window do not fit
  // (ch, t), or when the asymmetry pair is not a subset of the planted channels.
  void validate(std::size_t channels, std::size_t timesteps) const;

  // Four evenly spaced planted channels, two active per sample, the middle two
  // forming an asymmetry pair, half-length window.
  static PlantSpec channel_benchmark(std::size_t channels, std::size_t timesteps);

  // Every channel with a quarter-turn phase step between neighbours, so the
  // burst cancels under spatial averaging, in a 64-step window placed
  // anywhere in the sample.
  static PlantSpec timestep_benchmark(std::size_t channels, std::size_t timesteps);

  friend bool operator==(const PlantSpec&, const PlantSpec&) = default;
};

// Where one synthetic sample actually carries class information.
struct PlantedRegion {
  std::vector<std::size_t> channels;
  std::size_t t_start = 0;
  std::size_t t_end = 0;

  friend bool operator==(const PlantedRegion&, const PlantedRegion&) = default;
};

enum class Split { kTrain, kTest };

const char* split_name(Split s);

struct LabeledSample {
  EegMatrix x;
  std::size_t label;
  Split split;
  std::string file;  // relative to the manifest directory
  std::optional<PlantedRegion> truth;  // synthetic samples only

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct DatasetManifest {
  std::string version = "v1";
  std::size_t num_classes = 0;
  std::size_t channels = 0;
  std::size_t timesteps = 0;
  std::uint64_t seed = 0;
  std::optional<PlantSpec> plant;
  std::vector<LabeledSample> samples;

  std::vector<const LabeledSample*> subset(Split s) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct GeneratorOptions {
  std::size_t samples_per_class = 200;
  std::size_t num_classes = 2;
  std::size_t channels = 32;
  std::size_t timesteps = 512;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
};

/// Seeded planted-saliency dataset. Per class, the last
/// floor(test_fraction * samples_per_class) samples form the test split.
DatasetManifest generate_synthetic(const PlantSpec& spec, const GeneratorOptions& opts);

// Noise-free planted pattern for a class over spec's channels and window, or
// over an explicit region; exposed for tests and the recall oracle.
EegMatrix planted_pattern(const PlantSpec& spec, std::size_t label, std::size_t num_classes,
                          std::size_t channels, std::size_t timesteps);
EegMatrix planted_pattern(const PlantSpec& spec, std::size_t label, std::size_t num_classes,
                          std::size_t channels, std::size_t timesteps,
                          const PlantedRegion& region);

/// Writes `path` (JSON) plus one CSV per sample under samples/ next to it.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Throws FormatError naming the file (and row, for CSV problems).
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace ctxsal
