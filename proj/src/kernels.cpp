#include "plebo/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace plebo::kernels {

#if defined(PLEBO_KERNELS_AVX2)
const Ops* avx2_ops_if_supported();
#endif

namespace {

const Ops* resolve(std::string_view name) {
  if (name == "scalar") return &scalar_ops();
#if defined(PLEBO_KERNELS_AVX2)
  if (name == "avx2") return avx2_ops_if_supported();
#endif
  if (name == "auto" || name.empty()) {
#if defined(PLEBO_KERNELS_AVX2)
    if (const Ops* ops = avx2_ops_if_supported()) return ops;
#endif
    return &scalar_ops();
  }
  return nullptr;
}

std::atomic<const Ops*>& slot() {
  static std::atomic<const Ops*> selected{nullptr};
  return selected;
}

}  // namespace

const Ops& active() {
  const Ops* ops = slot().load(std::memory_order_acquire);
  if (ops == nullptr) {
    const char* env = std::getenv("PLEBO_KERNEL");
    ops = resolve(env != nullptr ? std::string_view(env) : "auto");
    if (ops == nullptr) ops = &scalar_ops();  // unknown PLEBO_KERNEL value
    slot().store(ops, std::memory_order_release);
  }
  return *ops;
}

bool select(std::string_view name) {
  const Ops* ops = resolve(name);
  if (ops == nullptr) return false;
  slot().store(ops, std::memory_order_release);
  return true;
}

std::vector<std::string> available() {
  std::vector<std::string> names{"scalar"};
#if defined(PLEBO_KERNELS_AVX2)
  if (avx2_ops_if_supported() != nullptr) names.emplace_back("avx2");
#endif
  return names;
}

}  // namespace plebo::kernels
