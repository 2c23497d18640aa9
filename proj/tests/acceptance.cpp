// Acceptance suite: one PASS/FAIL line per criterion on stdout, details on
// the indented lines below it. Exit status is non-zero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ctxsal/architectures.hpp"
#include "ctxsal/csv.hpp"
#include "ctxsal/dataset.hpp"
#include "ctxsal/evaluation.hpp"
#include "ctxsal/numerics.hpp"
#include "ctxsal/perturbation.hpp"
#include "ctxsal/saliency.hpp"
#include "ctxsal/simd/kernels.hpp"
#include "ctxsal/trainer.hpp"

using namespace ctxsal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& summary) {
  std::printf("CRITERION %2d %s  %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  std::fputs("    ", stdout);
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::fputc('\n', stdout);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt("%.3f", v[i]);
  return s + "]";
}

EegMatrix random_matrix(std::size_t ch, std::size_t t, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  EegMatrix m(ch, t);
  for (double& v : m.values()) v = u(rng);
  return m;
}

const std::size_t kJobs = std::max(1u, std::thread::hardware_concurrency());

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  const ModelShape shape{6, 24, 3};
  double worst = 0.0;
  std::map<std::string, double> per_arch;
  for (Architecture arch : {Architecture::kLinear, Architecture::kMlp, Architecture::kConvNet}) {
    ModelConfig c;
    c.arch = arch;
    c.hidden = 8;
    c.filters = 3;
    c.kernel = 5;
    c.group_size = 2;
    c.pool = 2;
    std::mt19937_64 rng(1000 + static_cast<int>(arch));
    double arch_worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      std::vector<double> params(parameter_count(c, shape));
      for (double& v : params) v = u(rng);
      const auto model = make_model(c, shape, std::move(params));
      const EegMatrix x = random_matrix(6, 24, rng, -2.0, 2.0);
      const EegMatrix p = random_matrix(6, 24, rng, -2.0, 2.0);
      const EegMatrix m = random_matrix(6, 24, rng, 0.02, 0.98);
      // half the triples include the area term (random masks have no ties)
      const MaskObjective obj{trial % 2 == 1, 0.5, 0.05};
      const auto target = model->forward(x);
      const EegMatrix analytic = mask_gradient(*model, x, p, m, target, obj);
      const EegMatrix numeric = finite_difference_gradient(
          [&](const EegMatrix& z) { return mask_objective(*model, x, p, z, target, obj).total; }, m,
          1e-6);
      arch_worst = std::max(arch_worst, relative_frobenius_error(analytic, numeric));
    }
    per_arch[architecture_tag(arch)] = arch_worst;
    worst = std::max(worst, arch_worst);
  }
  const double elapsed = seconds_since(t0);
  for (const auto& [name, err] : per_arch) detail("%-8s worst relative error %.2e", name.c_str(), err);
  report(1, worst <= 1e-4 && elapsed <= 60.0,
         "mask gradient vs finite differences, 3 archs x 20 triples: worst " + fmt("%.2e", worst) +
             " (<= 1e-4), " + fmt("%.1f", elapsed) + " s (<= 60 s)");
}

void criterion2() {
  std::mt19937_64 rng(2);
  bool exact = true;
  const EegMatrix x = random_matrix(32, 512, rng, -50.0, 50.0);
  const EegMatrix p = random_matrix(32, 512, rng, -50.0, 50.0);
  const simd::Isa saved = simd::active().isa;
  for (const auto* table : simd::available_kernels()) {
    simd::select(table->isa);
    exact &= apply_mask(x, SaliencyMask::filled(32, 512, 1.0), p) == x;
    exact &= apply_mask(x, SaliencyMask::filled(32, 512, 0.0), p) == p;
    detail("kernels %-6s identities %s", table->name, exact ? "exact" : "VIOLATED");
  }
  simd::select(saved);

  // 20 x 500 = 10^4 fusion weight pairs
  const EegMatrix y = random_matrix(20, 500, rng, -10.0, 10.0);
  const ContextPerturbation cp = build_context(y);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    worst = std::max(worst, std::abs(cp.w_temporal.values()[i] + cp.w_spatial.values()[i] - 1.0));
  }
  report(2, exact && worst <= 1e-12,
         std::string("blend at m=1 / m=0 ") + (exact ? "bit-exact" : "NOT exact") +
             "; max |w_t + w_s - 1| over 1e4 entries " + fmt("%.2e", worst) + " (<= 1e-12)");
}

// Entrywise recomputation from the definitions, in long double.
double criterion3_shape(const EegMatrix& x, std::size_t kt, std::size_t ks) {
  const ContextPerturbation cp = build_context(x, kt, ks);
  const long C = static_cast<long>(x.channels()), T = static_cast<long>(x.timesteps());
  double worst = 0.0;
  for (long c = 0; c < C; ++c) {
    for (long t = 0; t < T; ++t) {
      long double st = 0.0L, ss = 0.0L;
      long nt = 0, ns = 0;
      for (long d = -static_cast<long>(kt / 2); d <= static_cast<long>(kt / 2); ++d) {
        if (t + d >= 0 && t + d < T) {
          st += x(c, t + d);
          ++nt;
        }
      }
      for (long d = -static_cast<long>(ks / 2); d <= static_cast<long>(ks / 2); ++d) {
        if (c + d >= 0 && c + d < C) {
          ss += x(c + d, t);
          ++ns;
        }
      }
      const long double ct = st / nt, cs = ss / ns;
      const long double et = std::exp(ct), es = std::exp(cs);
      const long double wt = et / (et + es), ws = es / (et + es);
      const long double pv = wt * ct + ws * cs;
      const auto at = [](const EegMatrix& m, long i, long j) { return static_cast<long double>(m(i, j)); };
      for (long double e : {at(cp.c_temporal, c, t) - ct, at(cp.c_spatial, c, t) - cs,
                            at(cp.w_temporal, c, t) - wt, at(cp.w_spatial, c, t) - ws,
                            at(cp.p, c, t) - pv}) {
        worst = std::max(worst, static_cast<double>(std::fabs(e)));
      }
    }
  }
  return worst;
}

void criterion3() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  std::size_t shapes = 0;
  for (std::size_t ch = 1; ch <= 8; ++ch) {
    for (std::size_t t = 1; t <= 16; ++t) {
      const EegMatrix x = random_matrix(ch, t, rng, -3.0, 3.0);
      for (auto [kt, ks] : {std::pair<std::size_t, std::size_t>{kDefaultTemporalKernel, kDefaultSpatialKernel},
                            {3, 3}, {5, 7}, {1, 1}}) {
        worst = std::max(worst, criterion3_shape(x, kt, ks));
      }
      ++shapes;
    }
  }
  report(3, worst <= 1e-12,
         "build_context vs entrywise recomputation on " + std::to_string(shapes) +
             " shapes up to 8x16, 4 kernel pairs: max abs error " + fmt("%.2e", worst) + " (<= 1e-12)");
}

// ---------------------------------------------------------------------------
// Planted benchmark shared by criteria 4, 5, 6, 8, 10.

TrainOptions mlp_options(std::uint64_t seed) {
  TrainOptions t;
  t.model.arch = Architecture::kMlp;
  t.model.hidden = 64;
  t.epochs = 20;
  t.lr = 0.01;
  t.weight_decay = 5.0;
  t.seed = seed;
  return t;
}

struct Benchmark {
  DatasetManifest data;
  std::unique_ptr<DifferentiableModel> model;
  double test_accuracy = 0.0;
  std::vector<const LabeledSample*> test;
  std::map<Method, std::vector<SaliencyMask>> masks;  // default-config masks, cached
};

Benchmark make_benchmark(const PlantSpec& plant, std::uint64_t seed) {
  Benchmark b;
  GeneratorOptions g;
  g.seed = seed;
  b.data = generate_synthetic(plant, g);
  auto r = train(b.data, mlp_options(seed));
  b.model = std::move(r.model);
  b.test_accuracy = r.test_accuracy;
  b.test = b.data.subset(Split::kTest);
  return b;
}

const std::vector<SaliencyMask>& masks_for(Benchmark& b, Method m) {
  auto it = b.masks.find(m);
  if (it == b.masks.end()) {
    it = b.masks.emplace(m, explain_all(*b.model, b.test, m, ExplainConfig{}, kJobs)).first;
  }
  return it->second;
}

std::map<std::uint64_t, Benchmark>& channel_benchmarks() {
  static std::map<std::uint64_t, Benchmark> cache;
  return cache;
}

Benchmark& channel_benchmark(std::uint64_t seed) {
  auto& cache = channel_benchmarks();
  auto it = cache.find(seed);
  if (it == cache.end()) {
    it = cache.emplace(seed, make_benchmark(PlantSpec::channel_benchmark(32, 512), seed)).first;
  }
  return it->second;
}

ReductionReport reduce(const Benchmark& b, const std::vector<SaliencyMask>& masks, const char* tag,
                       Selection sel, ReductionMode mode = ReductionMode::kChannel,
                       std::vector<std::size_t> k = {0, 2, 4, 6}) {
  ReductionOptions o;
  o.mode = mode;
  o.selection = sel;
  o.k_list = std::move(k);
  return run_reduction(*b.model, b.test, masks, tag, o, b.data.plant);
}

void criteria4and5() {
  const auto t0 = Clock::now();
  Benchmark& b = channel_benchmark(1);
  detail("channel benchmark seed 1: %zu test samples, MLP test accuracy %.3f", b.test.size(),
         b.test_accuracy);
  const auto t_explain = Clock::now();
  const auto& ctx = masks_for(b, Method::kContext);
  const double explain_s = seconds_since(t_explain);
  const auto& grad = masks_for(b, Method::kGradient);

  const auto top = reduce(b, ctx, "context", Selection::kTop);
  const auto bottom = reduce(b, ctx, "context", Selection::kBottom);
  const auto gtop = reduce(b, grad, "gradient", Selection::kTop);
  detail("k = {0,2,4,6}");
  detail("context top    accuracy %s recall %s", join(top.accuracy).c_str(), join(*top.planted_recall).c_str());
  detail("context bottom accuracy %s", join(bottom.accuracy).c_str());
  detail("gradient top   accuracy %s recall %s", join(gtop.accuracy).c_str(), join(*gtop.planted_recall).c_str());
  detail("context explanation time %.1f s, total %.1f s", explain_s, seconds_since(t0));

  const double gap = bottom.accuracy[1] - top.accuracy[1];
  report(4, b.test_accuracy >= 0.9 && gap >= 0.20 && seconds_since(t0) <= 600.0,
         "bottom-2 minus top-2 accuracy " + fmt("%.3f", gap) + " (>= 0.20), model test accuracy " +
             fmt("%.3f", b.test_accuracy) + " (>= 0.90)");

  bool ok = true;
  std::string s;
  for (std::size_t i = 1; i <= 3; ++i) {
    const double dc = top.baseline_accuracy - top.accuracy[i];
    const double dg = gtop.baseline_accuracy - gtop.accuracy[i];
    ok &= dc >= dg;
    s += "k=" + std::to_string(top.k[i]) + " drop " + fmt("%.2f", dc) + " vs " + fmt("%.2f", dg) + "; ";
  }
  const double rc = (*top.planted_recall)[1], rg = (*gtop.planted_recall)[1];
  ok &= rc >= rg;
  report(5, ok, "context vs gradient " + s + "recall@2 " + fmt("%.2f", rc) + " vs " + fmt("%.2f", rg));
}

void criterion6() {
  Benchmark& src = channel_benchmark(1);
  TrainOptions t;
  t.model.arch = Architecture::kLinear;
  t.epochs = 20;
  t.lr = 0.01;
  t.seed = 1;
  const auto r = train(src.data, t);
  detail("linear model test accuracy %.3f", r.test_accuracy);
  const auto& model = *r.model;

  ExplainConfig cfg;
  const std::size_t n = 12;
  std::vector<std::size_t> cls;
  std::vector<SaliencyMask> grad, ctx;
  for (std::size_t i = 0; i < n; ++i) {
    cls.push_back(model.predict(src.test[i]->x));
    grad.push_back(gradient_saliency(model, src.test[i]->x));
    ctx.push_back(explain_context(model, src.test[i]->x, cfg).mask);
  }
  std::size_t pairs = 0, grad_equal = 0, ctx_differ = 0;
  double min_dist = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cls[i] != cls[j]) continue;
      ++pairs;
      grad_equal += grad[i] == grad[j] ? 1 : 0;
      const double d = frobenius_distance(ctx[i].matrix(), ctx[j].matrix());
      ctx_differ += d > 0.0 ? 1 : 0;
      min_dist = std::min(min_dist, d);
    }
  }
  report(6, pairs > 0 && grad_equal == pairs && ctx_differ == pairs,
         std::to_string(pairs) + " same-class pairs: gradient masks bit-identical in " +
             std::to_string(grad_equal) + ", context masks differ in " + std::to_string(ctx_differ) +
             " (min Frobenius distance " + fmt("%.3g", min_dist) + ")");
}

void criterion7() {
  Benchmark b = make_benchmark(PlantSpec::timestep_benchmark(32, 512), 7);
  detail("time-step benchmark seed 7: %zu test samples, MLP test accuracy %.3f", b.test.size(),
         b.test_accuracy);
  const auto& ctx = masks_for(b, Method::kContext);
  const auto& grad = masks_for(b, Method::kGradient);
  const std::vector<std::size_t> k{0, 64};
  const auto top = reduce(b, ctx, "context", Selection::kTop, ReductionMode::kTimestep, k);
  const auto bottom = reduce(b, ctx, "context", Selection::kBottom, ReductionMode::kTimestep, k);
  const auto gtop = reduce(b, grad, "gradient", Selection::kTop, ReductionMode::kTimestep, k);
  detail("recall@64 context %.3f gradient %.3f", (*top.planted_recall)[1], (*gtop.planted_recall)[1]);
  const double a_top = top.accuracy[1], a_bot = bottom.accuracy[1], a_grad = gtop.accuracy[1];
  report(7, a_top < a_bot && a_top < a_grad,
         "accuracy after removing 64 steps: context top " + fmt("%.3f", a_top) + ", context bottom " +
             fmt("%.3f", a_bot) + ", gradient top " + fmt("%.3f", a_grad) + " (baseline " +
             fmt("%.3f", top.baseline_accuracy) + ")");
}

void criterion8() {
  Benchmark& b = channel_benchmark(1);
  ExplainConfig cfg;
  cfg.area_enabled = true;
  cfg.area_ratio = 0.5;
  cfg.lambda = 0.05;
  cfg.stage_switch = 100;
  const auto masks = explain_all(*b.model, b.test, Method::kContext, cfg, kJobs);
  std::size_t above = 0, total = 0;
  for (const auto& m : masks) {
    for (double v : m.matrix().values()) above += v > 0.1 ? 1 : 0;
    total += m.matrix().size();
  }
  const double frac = static_cast<double>(above) / static_cast<double>(total);
  const auto area = reduce(b, masks, "context+area", Selection::kTop);
  const auto grad = reduce(b, masks_for(b, Method::kGradient), "gradient", Selection::kTop);
  detail("area-limited top accuracy %s", join(area.accuracy).c_str());
  detail("gradient top accuracy     %s", join(grad.accuracy).c_str());
  bool ok = frac <= 0.55;
  std::string s;
  for (std::size_t i = 1; i <= 3; ++i) {
    const double da = area.baseline_accuracy - area.accuracy[i];
    const double dg = grad.baseline_accuracy - grad.accuracy[i];
    ok &= da >= dg;
    s += "k=" + std::to_string(area.k[i]) + " drop " + fmt("%.2f", da) + " vs " + fmt("%.2f", dg) +
         (da >= dg ? "; " : " (short); ");
  }
  s.resize(s.size() - 2);
  report(8, ok, "fraction of entries > 0.1 " + fmt("%.3f", frac) + " (<= 0.55); area vs gradient " + s);
}

double planted_mass_fraction(const std::vector<SaliencyMask>& masks,
                             const std::vector<std::size_t>& channels) {
  double f = 0.0;
  for (const auto& m : masks) {
    double planted = 0.0, total = 0.0;
    for (std::size_t ch = 0; ch < m.channels(); ++ch) {
      double row = 0.0;
      for (double v : m.matrix().row(ch)) row += v;
      total += row;
      if (std::find(channels.begin(), channels.end(), ch) != channels.end()) planted += row;
    }
    f += total > 0.0 ? planted / total : 0.0;
  }
  return f / static_cast<double>(masks.size());
}

// Two-stage (area from epoch k+1 = 101) vs one-stage (area from epoch 1).
std::pair<double, double> two_vs_one_stage(const std::vector<std::size_t>& channels,
                                           std::uint64_t seed, std::size_t samples) {
  PlantSpec plant = PlantSpec::channel_benchmark(32, 512);
  plant.planted_channels = channels;
  plant.asymmetry_pair.reset();
  plant.active_count = 0;
  Benchmark b = make_benchmark(plant, seed);
  b.test.resize(std::min(samples, b.test.size()));
  double out[2];
  for (int stage = 0; stage < 2; ++stage) {
    ExplainConfig cfg;
    cfg.area_enabled = true;
    cfg.stage_switch = stage == 0 ? 100 : 0;
    out[stage] = planted_mass_fraction(explain_all(*b.model, b.test, Method::kContext, cfg, kJobs),
                                       channels);
  }
  return {out[0], out[1]};
}

void criterion9() {
  const std::vector<std::size_t> last{28, 29, 30, 31}, first{0, 1, 2, 3};
  const std::size_t samples = 20;
  double two = 0.0, one = 0.0;
  std::size_t wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto [t, o] = two_vs_one_stage(last, seed, samples);
    detail("seed %llu planted 28-31: two-stage %.4f one-stage %.4f",
           static_cast<unsigned long long>(seed), t, o);
    two += t / 5.0;
    one += o / 5.0;
    wins += t >= o ? 1 : 0;
  }
  // Mirror image, informational only: shows the tie-break ordering effect.
  double two_f = 0.0, one_f = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto [t, o] = two_vs_one_stage(first, seed, samples);
    two_f += t / 5.0;
    one_f += o / 5.0;
  }
  detail("info, planted 0-3 instead: two-stage %.4f one-stage %.4f (mean over 5 seeds)", two_f, one_f);
  report(9, two >= one,
         "planted mass fraction on channels 28-31, mean over 5 seeds x " + std::to_string(samples) +
             " samples: two-stage " + fmt("%.4f", two) + " vs one-stage " + fmt("%.4f", one) + " (" +
             std::to_string(wins) + "/5 seeds two-stage >=)");
}

void criterion10() {
  std::vector<double> ctx(3, 0.0), noctx(3, 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Benchmark& b = channel_benchmark(seed);
    const auto rc = reduce(b, masks_for(b, Method::kContext), "context", Selection::kTop);
    const auto rn = reduce(b, masks_for(b, Method::kNoContext), "nocontext", Selection::kTop);
    detail("seed %llu test acc %.2f  context %s  nocontext %s", static_cast<unsigned long long>(seed),
           b.test_accuracy, join(rc.accuracy).c_str(), join(rn.accuracy).c_str());
    for (std::size_t i = 0; i < 3; ++i) {
      ctx[i] += (rc.baseline_accuracy - rc.accuracy[i + 1]) / 5.0;
      noctx[i] += (rn.baseline_accuracy - rn.accuracy[i + 1]) / 5.0;
    }
    // masks for this seed are no longer needed
    b.masks.clear();
  }
  bool ok = true;
  std::string s;
  const int ks[] = {2, 4, 6};
  for (std::size_t i = 0; i < 3; ++i) {
    ok &= ctx[i] >= noctx[i];
    s += "k=" + std::to_string(ks[i]) + " drop " + fmt("%.3f", ctx[i]) + " vs " + fmt("%.3f", noctx[i]) +
         (ctx[i] >= noctx[i] ? "; " : " (short); ");
  }
  s.resize(s.size() - 2);
  report(10, ok, "context vs no-context, mean drop over 5 seeds: " + s);
}

// ---------------------------------------------------------------------------

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CTXSAL_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void criterion11() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("ctxsal_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };

  bool ok = run("gen-data --out " + p("data") + " --samples-per-class 20 --seed 11").code == 0 &&
            run("train --manifest " + p("data/manifest.json") + " --out " + p("model.json") +
                " --weight-decay 5 --seed 11")
                    .code == 0;
  std::string why = ok ? "" : "setup failed";
  // Identical command lines both times (the echoed config includes paths);
  // outputs are moved aside between runs.
  const std::vector<std::string> outputs{"mask.csv", "mask.svg", "trace.json", "explain.txt",
                                         "report.json", "report.csv", "evaluate.txt"};
  for (int rep = 0; ok && rep < 2; ++rep) {
    ok &= run("explain --model " + p("model.json") + " --manifest " + p("data/manifest.json") +
              " --index 3 --seed 5 --area --out " + p("mask.csv") + " --svg " + p("mask.svg") +
              " --trace " + p("trace.json") + " > " + p("explain.txt"))
              .code == 0;
    ok &= run("evaluate --model " + p("model.json") + " --manifest " + p("data/manifest.json") +
              " --limit 4 --k-list 0,2,4 --seed 5 --out " + p("report.json") + " --csv " +
              p("report.csv") + " > " + p("evaluate.txt"))
              .code == 0;
    if (!ok) {
      why = "command failed";
      break;
    }
    for (const auto& f : outputs) fs::rename(dir / f, dir / (f + "." + std::to_string(rep)));
  }
  std::size_t compared = 0;
  if (ok) {
    for (const auto& f : outputs) {
      ++compared;
      if (read_text_file(dir / (f + ".0")) != read_text_file(dir / (f + ".1"))) {
        ok = false;
        why += f + " differs; ";
      }
    }
  }
  fs::remove_all(dir);
  report(11, ok,
         "explain and evaluate run twice with the same seed: " + std::to_string(compared) +
             " output pairs compared, " + (ok ? std::string("all byte-identical") : why));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  std::printf("acceptance suite (kernels: %s, worker threads: %zu)\n", simd::active().name, kJobs);
  const std::vector<std::pair<std::vector<int>, std::function<void()>>> steps{
      {{1}, criterion1},  {{2}, criterion2}, {{3}, criterion3}, {{4, 5}, criteria4and5},
      {{6}, criterion6},  {{7}, criterion7}, {{8}, criterion8}, {{9}, criterion9},
      {{10}, criterion10}, {{11}, criterion11}};
  for (const auto& [ids, step] : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      for (int id : ids) report(id, false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d criterion(s) failed; total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
