#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "leafldp/kernels.hpp"

namespace leafldp::kernels {

#if !defined(LEAFLDP_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(LEAFLDP_HAVE_AVX2)
      return avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {

const KernelTable& table_for(Isa isa) {
  if (isa == Isa::avx2 && supported(Isa::avx2)) return *avx2_table();
  return scalar_table();
}

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("LEAFLDP_KERNEL"); forced != nullptr) {
    if (std::string(forced) == "scalar") return &scalar_table();
  }
  return supported(Isa::avx2) ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
  if (!supported(isa))
    throw std::invalid_argument("kernel variant '" + std::string(to_string(isa)) +
                                "' is not available on this machine");
  current().store(&table_for(isa), std::memory_order_release);
}

}  // namespace leafldp::kernels
