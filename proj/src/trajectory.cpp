#include "chanspec/trajectory.hpp"

#include <cmath>
#include <thread>

namespace chanspec {

namespace {

constexpr double kProbTol = 1e-10;

double real_trace(const CMat& m) {
  double t = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) t += m(i, i).real();
  return t;
}

}  // namespace

StateVec StateVec::from_density(const CMat& rho) {
  require_finite(rho, "StateVec");
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument("StateVec: density operator must be square");
  }
  if ((rho - rho.adjoint()).norm() > 1e-10 * std::max(1.0, rho.norm())) {
    throw std::invalid_argument("StateVec: density operator not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12) {
    throw std::invalid_argument("StateVec: trace must be 1");
  }
  HermEig eig = eig_hermitian(0.5 * (rho + rho.adjoint()));
  if (eig.values.minCoeff() < -1e-10) {
    throw std::invalid_argument("StateVec: density operator not positive semidefinite");
  }
  return StateVec{rho.rows(), vectorize(rho)};
}

StateVec maximally_mixed(Eigen::Index d) {
  return StateVec::from_density(CMat::Identity(d, d) / double(d));
}

StateVec product_state(const std::vector<std::array<double, 3>>& blochs) {
  CMat rho = CMat::Identity(1, 1);
  for (const auto& braw : blochs) {
    std::array<double, 3> b = braw;
    double len = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (len > 1.0 + 1e-6) {
      throw std::invalid_argument("product_state: Bloch vector longer than 1");
    }
    if (len > 1.0) {  // rounding in user-entered components
      for (double& c : b) c /= len;
    }
    CMat site(2, 2);
    site << 0.5 * (1.0 + b[2]), 0.5 * Complex(b[0], -b[1]),
            0.5 * Complex(b[0], b[1]), 0.5 * (1.0 - b[2]);
    CMat next(rho.rows() * 2, rho.cols() * 2);
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        next.block(i * 2, j * 2, 2, 2) = rho(i, j) * site;
      }
    }
    rho = std::move(next);
  }
  return StateVec::from_density(rho);
}

FrequencySeries exact_probabilities(const KrausSet& chan, const StateVec& rho0,
                                    int outcome, int cycles) {
  if (outcome < 0 || outcome >= static_cast<int>(chan.operators.size())) {
    throw std::invalid_argument("exact_probabilities: invalid outcome index");
  }
  if (chan.dim != rho0.d) {
    throw std::invalid_argument("exact_probabilities: dimension mismatch");
  }
  const CMat& mi = chan.operators[static_cast<size_t>(outcome)];
  FrequencySeries out;
  out.kind = FrequencySeries::Kind::Exact;
  out.cycles = cycles;
  out.values.reserve(static_cast<size_t>(cycles));
  CMat rho = unvectorize(rho0.rho_vec);
  for (int m = 0; m < cycles; ++m) {
    double p = real_trace(mi * rho * mi.adjoint());
    if (p < -kProbTol || p > 1.0 + kProbTol) {
      throw std::runtime_error("exact_probabilities: probability outside [0,1]");
    }
    out.values.push_back(std::min(1.0, std::max(0.0, p)));
    CMat next = CMat::Zero(chan.dim, chan.dim);
    for (const CMat& mk : chan.operators) {
      next += mk * rho * mk.adjoint();
    }
    rho = std::move(next);
    double tr = real_trace(rho);
    if (std::abs(tr - 1.0) > 1e-10) {
      throw std::runtime_error("exact_probabilities: trace drifted from 1");
    }
  }
  return out;
}

double ExponentialModel::eval(int m) const {
  Complex acc = 0.0;
  for (const ExpMode& mode : modes) {
    if (mode.poly_order == 0) {
      acc += mode.amplitude * std::pow(mode.pole, m - 1);
    } else {
      acc += mode.amplitude * double(m - 1) * std::pow(mode.pole, m - 2);
    }
  }
  return acc.real();
}

ExponentialModel decompose_coefficients(const KrausSet& chan, const ChannelSpectrum& cs,
                                        const StateVec& rho0, int outcome) {
  if (cs.near_defective) {
    throw std::invalid_argument(
        "decompose_coefficients: near-defective spectrum, use the EP signal model");
  }
  if (outcome < 0 || outcome >= static_cast<int>(chan.operators.size())) {
    throw std::invalid_argument("decompose_coefficients: invalid outcome index");
  }
  const CMat& mi = chan.operators[static_cast<size_t>(outcome)];
  const Eigen::Index n = cs.values.size();
  ExponentialModel model;
  model.modes.reserve(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    CMat rj = unvectorize(cs.right.col(j));
    Complex meas = (mi * rj * mi.adjoint()).trace();
    Complex weight = cs.left.col(j).dot(rho0.rho_vec);
    model.modes.push_back(ExpMode{cs.values[j], meas * weight, 0});
  }
  return model;
}

std::vector<FrequencySeries> sample_trajectories(const KrausSet& chan,
                                                 const StateVec& rho0, int cycles,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed, int threads) {
  if (samples < 1) {
    throw std::invalid_argument("sample_trajectories: need at least one sample");
  }
  if (cycles < 1) {
    throw std::invalid_argument("sample_trajectories: need at least one cycle");
  }
  if (chan.dim != rho0.d) {
    throw std::invalid_argument("sample_trajectories: dimension mismatch");
  }
  const int r = static_cast<int>(chan.operators.size());
  const Eigen::Index d = chan.dim;

  // Mixed initial states are sampled through their eigendecomposition; each
  // trajectory then evolves a pure state, which leaves the outcome-record
  // distribution unchanged.
  HermEig rho_eig = eig_hermitian(unvectorize(rho0.rho_vec));
  std::vector<double> weight_cdf;
  std::vector<CVec> components;
  {
    double acc = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
      double w = std::max(0.0, rho_eig.values[j]);
      if (w < 1e-15) continue;
      acc += w;
      weight_cdf.push_back(acc);
      components.push_back(rho_eig.vectors.col(j));
    }
    for (double& c : weight_cdf) c /= acc;
    weight_cdf.back() = 1.0;
  }

  int nworkers = threads > 0 ? threads
                             : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nworkers = std::min<std::uint64_t>(nworkers, samples);

  // counts[w][outcome * cycles + m]
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<size_t>(nworkers),
      std::vector<std::uint64_t>(static_cast<size_t>(r) * cycles, 0));

  auto worker = [&](int w, std::uint64_t begin, std::uint64_t end) {
    std::vector<CVec> branch(static_cast<size_t>(r), CVec(d));
    auto& local = counts[static_cast<size_t>(w)];
    for (std::uint64_t t = begin; t < end; ++t) {
      SplitMix64 rng(SplitMix64::derive_stream(seed, t));
      // Draw the initial pure component.
      double u0 = rng.uniform();
      size_t comp = 0;
      while (comp + 1 < weight_cdf.size() && u0 >= weight_cdf[comp]) ++comp;
      CVec psi = components[comp];
      for (int m = 0; m < cycles; ++m) {
        double u = rng.uniform();
        double acc = 0.0;
        int pick = r - 1;
        for (int a = 0; a < r; ++a) {
          branch[static_cast<size_t>(a)].noalias() = chan.operators[static_cast<size_t>(a)] * psi;
          double p = branch[static_cast<size_t>(a)].squaredNorm();
          if (p < -1e-12) {
            throw std::runtime_error("sample_trajectories: negative branch probability");
          }
          acc += p;
          if (u < acc) {
            pick = a;
            break;
          }
        }
        const CVec& chosen = branch[static_cast<size_t>(pick)];
        psi = chosen / chosen.norm();
        ++local[static_cast<size_t>(pick) * cycles + static_cast<size_t>(m)];
      }
    }
  };

  if (nworkers == 1) {
    worker(0, 0, samples);
  } else {
    std::vector<std::thread> pool;
    std::uint64_t chunk = samples / nworkers;
    std::uint64_t rem = samples % nworkers;
    std::uint64_t begin = 0;
    for (int w = 0; w < nworkers; ++w) {
      std::uint64_t end = begin + chunk + (static_cast<std::uint64_t>(w) < rem ? 1 : 0);
      pool.emplace_back(worker, w, begin, end);
      begin = end;
    }
    for (auto& th : pool) th.join();
  }

  std::vector<FrequencySeries> out(static_cast<size_t>(r));
  for (int a = 0; a < r; ++a) {
    auto& series = out[static_cast<size_t>(a)];
    series.kind = FrequencySeries::Kind::Sampled;
    series.cycles = cycles;
    series.samples = samples;
    series.seed = seed;
    series.values.resize(static_cast<size_t>(cycles));
    for (int m = 0; m < cycles; ++m) {
      std::uint64_t total = 0;
      for (int w = 0; w < nworkers; ++w) {
        total += counts[static_cast<size_t>(w)][static_cast<size_t>(a) * cycles + static_cast<size_t>(m)];
      }
      series.values[static_cast<size_t>(m)] = double(total) / double(samples);
    }
  }
  return out;
}

}  // namespace chanspec
