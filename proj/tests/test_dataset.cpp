#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "ctxsal/csv.hpp"
#include "ctxsal/dataset.hpp"
#include "ctxsal/error.hpp"
#include "test_util.hpp"

namespace {

using namespace ctxsal;

PlantSpec small_plant() {
  PlantSpec p;
  p.planted_channels = {1, 3};
  p.t_start = 4;
  p.t_end = 16;
  p.asymmetry_pair = std::make_pair(std::size_t{1}, std::size_t{3});
  return p;
}

GeneratorOptions small_opts(std::uint64_t seed = 5) {
  GeneratorOptions o;
  o.samples_per_class = 8;
  o.channels = 6;
  o.timesteps = 24;
  o.seed = seed;
  return o;
}

bool in_region(const PlantedRegion& r, std::size_t ch, std::size_t t) {
  return std::find(r.channels.begin(), r.channels.end(), ch) != r.channels.end() &&
         t >= r.t_start && t < r.t_end;
}

TEST(PlantSpec, Validation) {
  PlantSpec p = small_plant();
  EXPECT_NO_THROW(p.validate(6, 24));
  EXPECT_THROW(p.validate(3, 24), InvalidArgument);  // channel 3 out of range
  EXPECT_THROW(p.validate(6, 10), InvalidArgument);  // window past T

  PlantSpec empty_window = small_plant();
  empty_window.t_end = empty_window.t_start;
  EXPECT_THROW(empty_window.validate(6, 24), InvalidArgument);

  PlantSpec dup = small_plant();
  dup.planted_channels = {1, 1};
  EXPECT_THROW(dup.validate(6, 24), InvalidArgument);

  PlantSpec bad_pair = small_plant();
  bad_pair.asymmetry_pair = std::make_pair(std::size_t{1}, std::size_t{2});
  EXPECT_THROW(bad_pair.validate(6, 24), InvalidArgument);

  PlantSpec too_many = small_plant();
  too_many.active_count = 3;
  EXPECT_THROW(too_many.validate(6, 24), InvalidArgument);

  PlantSpec jitter = small_plant();
  jitter.window_jitter = 9;  // 16 + 9 > 24
  EXPECT_THROW(jitter.validate(6, 24), InvalidArgument);
  jitter.window_jitter = 8;
  EXPECT_NO_THROW(jitter.validate(6, 24));

  EXPECT_THROW(generate_synthetic(p, [] {
                 auto o = small_opts();
                 o.num_classes = 1;
                 return o;
               }()),
               InvalidArgument);
}

TEST(PlantSpec, BenchmarksFitTheirShapes) {
  const PlantSpec c = PlantSpec::channel_benchmark(32, 512);
  EXPECT_NO_THROW(c.validate(32, 512));
  EXPECT_EQ(c.planted_channels, (std::vector<std::size_t>{4, 12, 20, 28}));
  EXPECT_EQ(c.active_count, 2u);
  const PlantSpec t = PlantSpec::timestep_benchmark(32, 512);
  EXPECT_NO_THROW(t.validate(32, 512));
  EXPECT_EQ(t.t_end - t.t_start, 64u);
  EXPECT_EQ(t.planted_channels.size(), 32u);
}

TEST(Synthetic, SameSeedIsBitIdentical) {
  const auto a = generate_synthetic(small_plant(), small_opts(9));
  const auto b = generate_synthetic(small_plant(), small_opts(9));
  EXPECT_EQ(a, b);
  const auto c = generate_synthetic(small_plant(), small_opts(10));
  EXPECT_NE(a.samples.front().x, c.samples.front().x);
}

TEST(Synthetic, SplitSizesAndLabels) {
  auto o = small_opts();
  o.num_classes = 3;
  o.test_fraction = 0.25;
  const auto d = generate_synthetic(small_plant(), o);
  EXPECT_EQ(d.samples.size(), 24u);
  EXPECT_EQ(d.subset(Split::kTest).size(), 6u);  // floor(0.25 * 8) per class
  for (const auto& s : d.samples) {
    EXPECT_LT(s.label, 3u);
    EXPECT_EQ(s.x.channels(), 6u);
    EXPECT_EQ(s.x.timesteps(), 24u);
    ASSERT_TRUE(s.truth.has_value());
  }
}

TEST(Synthetic, NoiselessClassesDifferOnlyInsidePlantedRegion) {
  PlantSpec p = small_plant();
  p.noise_std = 0.0;
  const auto d = generate_synthetic(p, small_opts());
  const LabeledSample* c0 = nullptr;
  const LabeledSample* c1 = nullptr;
  for (const auto& s : d.samples) {
    if (s.label == 0 && !c0) c0 = &s;
    if (s.label == 1 && !c1) c1 = &s;
  }
  ASSERT_TRUE(c0 && c1);
  bool any_diff = false;
  for (std::size_t ch = 0; ch < 6; ++ch) {
    for (std::size_t t = 0; t < 24; ++t) {
      const bool inside = in_region(*c0->truth, ch, t);
      if (!inside) {
        EXPECT_EQ(c0->x(ch, t), 0.0);
        EXPECT_EQ(c1->x(ch, t), 0.0);
      }
      any_diff |= c0->x(ch, t) != c1->x(ch, t);
    }
  }
  EXPECT_TRUE(any_diff);
}

TEST(Synthetic, NoiselessSampleEqualsItsPlantedPattern) {
  PlantSpec p = small_plant();
  p.noise_std = 0.0;
  const auto d = generate_synthetic(p, small_opts());
  for (const auto& s : d.samples) {
    const EegMatrix expect = planted_pattern(p, s.label, 2, 6, 24, *s.truth);
    EXPECT_EQ(s.x, expect);
  }
}

TEST(Synthetic, AsymmetryPairFlipsSecondChannelForOddClass) {
  PlantSpec p = small_plant();
  const EegMatrix a = planted_pattern(p, 0, 2, 6, 24);
  const EegMatrix b = planted_pattern(p, 1, 2, 6, 24);
  // class 1 has twice the magnitude and opposite polarity, except on channel 3
  for (std::size_t t = p.t_start; t < p.t_end; ++t) {
    EXPECT_NEAR(b(1, t), -2.0 * a(1, t), 1e-12);
    EXPECT_NEAR(b(3, t), 2.0 * a(3, t), 1e-12);
  }
}

TEST(Synthetic, ActiveDrawsAreSubsetsAndVary) {
  PlantSpec p = PlantSpec::channel_benchmark(16, 32);
  auto o = small_opts();
  o.channels = 16;
  o.timesteps = 32;
  o.samples_per_class = 30;
  const auto d = generate_synthetic(p, o);
  std::set<std::vector<std::size_t>> seen;
  for (const auto& s : d.samples) {
    ASSERT_TRUE(s.truth);
    EXPECT_EQ(s.truth->channels.size(), 2u);
    EXPECT_TRUE(std::is_sorted(s.truth->channels.begin(), s.truth->channels.end()));
    for (std::size_t ch : s.truth->channels) {
      EXPECT_NE(std::find(p.planted_channels.begin(), p.planted_channels.end(), ch),
                p.planted_channels.end());
    }
    seen.insert(s.truth->channels);
  }
  EXPECT_GT(seen.size(), 3u);
}

TEST(Synthetic, JitterMovesWindowByWholePeriods) {
  PlantSpec p = PlantSpec::timestep_benchmark(4, 256);
  auto o = small_opts();
  o.channels = 4;
  o.timesteps = 256;
  o.samples_per_class = 30;
  const auto d = generate_synthetic(p, o);
  std::set<std::size_t> starts;
  for (const auto& s : d.samples) {
    const auto& r = *s.truth;
    EXPECT_EQ(r.t_end - r.t_start, 64u);
    EXPECT_EQ((r.t_start - p.t_start) % p.carrier_period, 0u);
    EXPECT_LE(r.t_end, 256u);
    starts.insert(r.t_start);
  }
  EXPECT_GT(starts.size(), 5u);
}

TEST(Synthetic, PhaseStepCancelsUnderChannelAveraging) {
  // quarter-turn steps over 4 channels sum to zero at every time step
  PlantSpec p = PlantSpec::timestep_benchmark(8, 128);
  const EegMatrix pat = planted_pattern(p, 0, 2, 8, 128);
  for (std::size_t t = 0; t < 128; ++t) {
    double s = 0.0;
    for (std::size_t ch = 0; ch < 8; ++ch) s += pat(ch, t);
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(Manifest, SaveLoadRoundTrip) {
  ctxsal::testing::TempDir dir("manifest");
  PlantSpec p = PlantSpec::channel_benchmark(8, 24);
  auto o = small_opts();
  o.channels = 8;
  const auto d = generate_synthetic(p, o);
  save_manifest(d, dir / "manifest.json");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / d.samples.front().file));
  const auto back = load_manifest(dir / "manifest.json");
  EXPECT_EQ(back, d);
}

TEST(Manifest, MissingFilesAreListed) {
  ctxsal::testing::TempDir dir("manifest_missing");
  const auto d = generate_synthetic(small_plant(), small_opts());
  save_manifest(d, dir / "manifest.json");
  std::filesystem::remove(dir.path() / d.samples[0].file);
  std::filesystem::remove(dir.path() / d.samples[3].file);
  try {
    load_manifest(dir / "manifest.json");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(d.samples[0].file), std::string::npos) << msg;
    EXPECT_NE(msg.find(d.samples[3].file), std::string::npos) << msg;
  }
  EXPECT_THROW(load_manifest(dir / "nope.json"), FormatError);
}

TEST(Manifest, RaggedSampleNamesFileAndRow) {
  ctxsal::testing::TempDir dir("manifest_ragged");
  const auto d = generate_synthetic(small_plant(), small_opts());
  save_manifest(d, dir / "manifest.json");
  const auto victim = dir.path() / d.samples[2].file;
  std::string text = read_text_file(victim);
  // drop the last value of the second row
  const std::size_t row2_end = text.find('\n', text.find('\n') + 1);
  const std::size_t last_comma = text.rfind(',', row2_end);
  text.erase(last_comma, row2_end - last_comma);
  write_text_file(victim, text);
  try {
    load_manifest(dir / "manifest.json");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(d.samples[2].file), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  }
}

TEST(Manifest, RejectsUnknownVersionAndBadTruth) {
  ctxsal::testing::TempDir dir("manifest_version");
  const auto d = generate_synthetic(small_plant(), small_opts());
  save_manifest(d, dir / "manifest.json");
  auto j = nlohmann::json::parse(read_text_file(dir / "manifest.json"));

  auto v = j;
  v["version"] = "v9";
  write_text_file(dir / "manifest.json", v.dump());
  EXPECT_THROW(load_manifest(dir / "manifest.json"), FormatError);

  auto t = j;
  t["samples"][0]["truth"]["window"] = {20, 99};
  write_text_file(dir / "manifest.json", t.dump());
  EXPECT_THROW(load_manifest(dir / "manifest.json"), FormatError);

  auto l = j;
  l["samples"][0]["label"] = 7;
  write_text_file(dir / "manifest.json", l.dump());
  EXPECT_THROW(load_manifest(dir / "manifest.json"), FormatError);

  write_text_file(dir / "manifest.json", "{not json");
  EXPECT_THROW(load_manifest(dir / "manifest.json"), FormatError);
}

}  // namespace
