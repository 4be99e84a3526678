#pragma once

// Inner loops of the exact distribution recursion.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant chosen at runtime. The variants agree to a few ulps of the log
// values; tests/test_kernels.cpp checks the equivalence.

#include <cstddef>
#include <span>
#include <string_view>

namespace leafldp::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// log sum_j exp(logp[j] + (k0 + j) * lambda), and the tilted mean of k.
struct TiltedSums {
  double log_sum;
  double mean;
};

struct KernelTable {
  Isa isa;
  /// One step of the leaf chain in log space.
  /// in[j] = log P(Z_n = k0 + j), j < in.size(); out has in.size() + 1 slots:
  ///   out[j] = logaddexp(in[j] + log(min(k/s, 1)),
  ///                      in[j-1] + log(max(1 - (k-1)/s, 0))),  k = k0 + j.
  void (*log_step)(std::span<const double> in, std::span<double> out, double k0, double s);
  /// log sum exp(x); -inf for an empty or all -inf input.
  double (*log_sum_exp)(std::span<const double> x);
  TiltedSums (*tilted)(std::span<const double> logp, double k0, double lambda);
};

const KernelTable& scalar_table();
/// Null when the variant was not compiled in.
const KernelTable* avx2_table();

/// True when the variant is compiled in and the CPU supports it.
bool supported(Isa isa);

/// The table used by the library. Initialized on first use to the best
/// supported ISA, unless LEAFLDP_KERNEL=scalar is set in the environment.
const KernelTable& active();

/// Overrides the active table; throws std::invalid_argument if unsupported.
void select(Isa isa);

}  // namespace leafldp::kernels
