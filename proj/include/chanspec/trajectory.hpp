#pragma once

#include <cstdint>
#include <vector>

#include "chanspec/channel.hpp"

namespace chanspec {

/// Vectorized density operator with Hermiticity / positivity / unit-trace
/// validation on construction.
struct StateVec {
  Eigen::Index d = 0;
  CVec rho_vec;

  static StateVec from_density(const CMat& rho);
};

StateVec maximally_mixed(Eigen::Index d);

/// Product state of spin-1/2 sites from per-site Bloch vectors (|b| <= 1).
StateVec product_state(const std::vector<std::array<double, 3>>& blochs);

struct FrequencySeries {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  int cycles = 0;
  std::vector<double> values;  // index m-1 holds f^(m), m = 1..N
  std::uint64_t samples = 0;   // S, for sampled series
  std::uint64_t seed = 0;
};

/// Outcome-i probabilities p_i^(m) = <<I| M_i Phi^{m-1} |rho>> for
/// m = 1..cycles, computed by iterated application of the channel.
FrequencySeries exact_probabilities(const KrausSet& chan, const StateVec& rho0,
                                    int outcome, int cycles);

/// One exponential mode of the signal model sum_j c_j lambda_j^{m-1}
/// (poly_order 1 adds the near-EP term c * (m-1) * lambda^{m-2}).
struct ExpMode {
  Complex pole;
  Complex amplitude;
  int poly_order = 0;
};

struct ExponentialModel {
  std::vector<ExpMode> modes;
  double residual = 0.0;

  double eval(int m) const;  // m = 1..N
};

/// Spectral coefficients c_j = Tr(M_i R_j M_i^dag) Tr(L_j^dag rho) of the
/// outcome-probability signal.  Requires a non-defective channel spectrum.
ExponentialModel decompose_coefficients(const KrausSet& chan, const ChannelSpectrum& cs,
                                        const StateVec& rho0, int outcome);

/// SplitMix64: the seedable 64-bit generator used for trajectory sampling.
/// Per-trajectory streams are derived from (master seed, trajectory index),
/// which makes sampling independent of the worker count.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() {  // [0, 1)
    return double(next() >> 11) * 0x1.0p-53;
  }
  static std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    SplitMix64 g(master_seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    g.next();
    return g.next();
  }
};

/// Monte-Carlo sampling of stochastic measurement records: per trajectory,
/// outcomes are drawn with p_alpha = <<I| M_alpha |rho>> and the state
/// collapses to the corresponding branch.  Returns one frequency series per
/// outcome; sum over outcomes is exactly 1 at every cycle, and results are
/// bit-for-bit reproducible for a given seed regardless of `threads`.
std::vector<FrequencySeries> sample_trajectories(const KrausSet& chan,
                                                 const StateVec& rho0, int cycles,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed,
                                                 int threads = 0);

}  // namespace chanspec
