#include <atomic>
#include <cstdlib>
#include <string>

#include "ctxsal/error.hpp"
#include "kernels_impl.hpp"

namespace ctxsal::simd {

namespace {

bool cpu_has_avx2() {
#if defined(CTXSAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &scalar_kernels();
    case Isa::kAvx2:
#if defined(CTXSAL_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_kernels();
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(CTXSAL_HAVE_NEON)
      return &detail::neon_kernels();  // baseline on aarch64
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* best_available() {
  const auto tables = available_kernels();
  return tables.back();
}

const KernelTable* initial_table() {
  const char* env = std::getenv("CTXSAL_SIMD");
  if (env == nullptr || std::string_view(env).empty() || std::string_view(env) == "auto") {
    return best_available();
  }
  const KernelTable* t = table_for(parse_isa(env));
  if (t == nullptr) {
    throw InvalidArgument(std::string("CTXSAL_SIMD=") + env + " is not supported on this CPU");
  }
  return t;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (const KernelTable* t = table_for(isa)) out.push_back(t);
  }
  return out;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) throw InvalidArgument("requested SIMD kernels are not available on this CPU");
  active_slot().store(t, std::memory_order_relaxed);
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  if (name == "auto") return best_available()->isa;
  throw InvalidArgument("unknown SIMD kernel set '" + std::string(name) + "'");
}

}  // namespace ctxsal::simd
