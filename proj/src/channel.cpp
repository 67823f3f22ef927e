#include "chanspec/channel.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace chanspec {

namespace {

constexpr double kTpTol = 1e-10;
constexpr double kFixedPointTol = 1e-8;
constexpr double kNearDefectiveTol = 1e-6;

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

double KrausSet::trace_preserving_residual() const {
  CMat acc = CMat::Zero(dim, dim);
  for (const CMat& m : operators) {
    acc += m.adjoint() * m;
  }
  return (acc - CMat::Identity(dim, dim)).norm();
}

KrausSet KrausSet::create(std::vector<CMat> ops, bool check_tp) {
  if (ops.empty()) {
    throw std::invalid_argument("KrausSet: at least one operator required");
  }
  const Eigen::Index d = ops.front().rows();
  for (const CMat& m : ops) {
    require_finite(m, "KrausSet");
    if (m.rows() != d || m.cols() != d) {
      throw std::invalid_argument("KrausSet: operators must be square with equal dimension");
    }
  }
  KrausSet k{d, std::move(ops)};
  if (check_tp && k.trace_preserving_residual() > kTpTol) {
    throw std::invalid_argument("KrausSet: trace preservation violated");
  }
  return k;
}

CVec vectorize(const CMat& op) {
  if (op.rows() != op.cols()) {
    throw std::invalid_argument("vectorize: operator must be square");
  }
  const Eigen::Index d = op.rows();
  CVec v(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      v[i * d + j] = op(i, j);
    }
  }
  return v;
}

CMat unvectorize(const CVec& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size()) {
    throw std::invalid_argument("unvectorize: length is not a perfect square");
  }
  CMat op(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      op(i, j) = v[i * d + j];
    }
  }
  return op;
}

SuperopMatrix natural_representation(const KrausSet& k) {
  CMat acc = CMat::Zero(k.dim * k.dim, k.dim * k.dim);
  for (const CMat& m : k.operators) {
    acc += kron(m, m.conjugate());
  }
  return SuperopMatrix{k.dim, std::move(acc)};
}

SuperopMatrix dual_representation(const KrausSet& k) {
  SuperopMatrix nat = natural_representation(k);
  return SuperopMatrix{k.dim, nat.mat.adjoint()};
}

CptpReport verify_cptp(const KrausSet& k) {
  CptpReport rep;
  rep.trace_preserving_residual = k.trace_preserving_residual();
  const Eigen::Index d = k.dim;
  // Choi matrix J = sum_ij |i><j| (x) Phi(|i><j|).
  CMat choi = CMat::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      CMat eij = CMat::Zero(d, d);
      eij(i, j) = 1.0;
      CMat phi = CMat::Zero(d, d);
      for (const CMat& m : k.operators) {
        phi += m * eij * m.adjoint();
      }
      choi.block(i * d, j * d, d, d) = phi;
    }
  }
  // The Choi matrix of a CP map is Hermitian; symmetrize rounding before eigh.
  CMat herm = 0.5 * (choi + choi.adjoint());
  HermEig eig = eig_hermitian(herm);
  rep.choi_min_eigenvalue = eig.values.minCoeff();
  rep.pass = rep.trace_preserving_residual <= kTpTol &&
             rep.choi_min_eigenvalue >= -kTpTol;
  return rep;
}

ChannelSpectrum spectral_decompose(const SuperopMatrix& s) {
  if (s.mat.rows() != s.d * s.d || s.mat.cols() != s.d * s.d) {
    throw std::invalid_argument("spectral_decompose: matrix size must be d^2 x d^2");
  }
  EigPair eig = eig_general(s.mat);
  ChannelSpectrum cs;
  cs.values = eig.values;
  cs.right = eig.right;
  cs.left = eig.left;
  cs.norm = s.mat.norm();
  cs.min_conditioning = eig.condition.size() ? eig.condition.minCoeff() : 1.0;
  cs.near_defective = cs.min_conditioning < kNearDefectiveTol;

  const Eigen::Index n = cs.values.size();
  const double pair_tol = scaled_tol(1e-8, std::max(1.0, cs.norm));
  cs.classification.assign(n, EigClass::Real);
  cs.partner.assign(n, -1);

  // Greedy nearest-conjugate pairing; ties broken by index order.
  std::vector<bool> done(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (done[i]) continue;
    if (std::abs(cs.values[i].imag()) <= pair_tol) {
      cs.classification[i] = EigClass::Real;
      done[i] = true;
      continue;
    }
    int best = -1;
    double best_dist = pair_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || done[j]) continue;
      if (std::abs(cs.values[j].imag()) <= pair_tol) continue;
      double dist = std::abs(cs.values[j] - std::conj(cs.values[i]));
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) {
      cs.classification[i] = EigClass::ConjugatePairMember;
      cs.classification[best] = EigClass::ConjugatePairMember;
      cs.partner[i] = best;
      cs.partner[static_cast<Eigen::Index>(best)] = static_cast<int>(i);
      done[i] = done[best] = true;
    } else {
      cs.classification[i] = EigClass::ConjugatePairMember;
      cs.unmatched.push_back(static_cast<int>(i));
      done[i] = true;
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(cs.values[i] - Complex(1.0, 0.0)) <= kFixedPointTol) {
      cs.fixed_point_indices.push_back(static_cast<int>(i));
    }
  }
  return cs;
}

MetricResult build_metric(const ChannelSpectrum& cs, const SuperopMatrix& s,
                          const std::vector<int>& signs) {
  if (cs.near_defective) {
    throw std::invalid_argument("build_metric: spectrum flagged near-defective");
  }
  if (!cs.unmatched.empty()) {
    throw std::invalid_argument("build_metric: unmatched complex eigenvalues");
  }
  const Eigen::Index n = cs.values.size();
  // Per-real-eigenvalue signs a_j, default +1.
  std::vector<int> a(n, 1);
  if (!signs.empty()) {
    size_t si = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (cs.classification[j] == EigClass::Real) {
        if (si < signs.size()) a[j] = signs[si++] >= 0 ? 1 : -1;
      }
    }
  }
  CMat eta = CMat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (cs.classification[j] == EigClass::Real) {
      eta += double(a[j]) * cs.left.col(j) * cs.left.col(j).adjoint();
    } else {
      eta += cs.left.col(j) * cs.left.col(cs.partner[j]).adjoint();
    }
  }
  MetricResult res;
  res.eta = eta;
  res.hermiticity_residual = (eta - eta.adjoint()).norm() / std::max(eta.norm(), 1e-300);
  Svd dec = svd(eta);
  const double smin = dec.singular_values[dec.singular_values.size() - 1];
  const double smax = dec.singular_values[0];
  res.condition_number = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (res.condition_number > 1e10) {
    throw std::runtime_error("build_metric: metric is numerically singular");
  }
  CMat eta_inv = eta.partialPivLu().solve(CMat::Identity(n, n));
  res.intertwining_residual =
      (eta * s.mat * eta_inv - s.mat.adjoint()).norm() / std::max(s.mat.norm(), 1e-300);
  return res;
}

double swap_time_residual(const SuperopMatrix& s) {
  const Eigen::Index d = s.d;
  const Eigen::Index n = d * d;
  // S |ij>> = |ji>> as an index permutation.
  CMat swapped(n, n);
  auto perm = [d](Eigen::Index k) { return (k % d) * d + k / d; };
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      swapped(r, c) = std::conj(s.mat(perm(r), perm(c)));
    }
  }
  return (swapped - s.mat).norm() / std::max(s.mat.norm(), 1e-300);
}

PairingReport classify_real_or_pairs(const ChannelSpectrum& cs) {
  PairingReport rep;
  rep.unmatched = cs.unmatched;
  const Eigen::Index n = cs.values.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cs.classification[i] == EigClass::Real) {
      ++rep.real_count;
    } else if (cs.partner[i] > static_cast<int>(i)) {
      rep.pairs.emplace_back(static_cast<int>(i), cs.partner[i]);
    }
  }
  rep.pass = rep.unmatched.empty();
  return rep;
}

std::string kraus_to_json_text(const KrausSet& k) {
  nlohmann::json j;
  j["dim"] = k.dim;
  nlohmann::json ops = nlohmann::json::array();
  for (const CMat& m : k.operators) {
    nlohmann::json flat = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        flat.push_back({m(r, c).real(), m(r, c).imag()});
      }
    }
    ops.push_back(std::move(flat));
  }
  j["operators"] = std::move(ops);
  return j.dump(2);
}

KrausSet kraus_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("dim") || !j.contains("operators")) {
    throw std::invalid_argument("kraus json: missing 'dim' or 'operators'");
  }
  const auto d = j["dim"].get<Eigen::Index>();
  if (d <= 0) {
    throw std::invalid_argument("kraus json: dim must be positive");
  }
  std::vector<CMat> ops;
  for (const auto& flat : j["operators"]) {
    if (static_cast<Eigen::Index>(flat.size()) != d * d) {
      throw std::invalid_argument("kraus json: operator entry count != dim^2");
    }
    CMat m(d, d);
    Eigen::Index idx = 0;
    for (const auto& pair : flat) {
      if (pair.size() != 2) {
        throw std::invalid_argument("kraus json: entries must be [re, im] pairs");
      }
      m(idx / d, idx % d) = Complex(pair[0].get<double>(), pair[1].get<double>());
      ++idx;
    }
    ops.push_back(std::move(m));
  }
  return KrausSet::create(std::move(ops));
}

KrausSet load_kraus_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open kraus file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return kraus_from_json_text(ss.str());
}

void save_kraus_json(const KrausSet& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write kraus file: " + path);
  }
  out << kraus_to_json_text(k) << "\n";
}

}  // namespace chanspec
