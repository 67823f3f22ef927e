#include "chanspec/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace chanspec {

std::vector<BetaEstimate> phases_to_betas(const EstimatedSpectrum& spec, double tau_b_s) {
  if (tau_b_s <= 0) {
    throw std::invalid_argument("phases_to_betas: tau_B must be positive");
  }
  std::vector<BetaEstimate> out;
  for (size_t i = 0; i < spec.poles.size(); ++i) {
    const EstimatedPole& p = spec.poles[i];
    if (std::abs(p.pole) < 1e-12) {
      throw std::invalid_argument("phases_to_betas: zero pole magnitude");
    }
    double phase = p.phase_rad;
    if (phase <= 1e-9) continue;  // real poles and the conjugate duplicates
    BetaEstimate b;
    b.phase_rad = phase;
    b.beta_rad_s = phase / tau_b_s;
    b.aliased = phase > M_PI - 0.05;
    b.pole_index = static_cast<int>(i);
    b.amplitude = std::abs(p.amplitude);
    out.push_back(b);
  }
  return out;
}

ParameterPattern ParameterPattern::two_spin() {
  ParameterPattern p;
  p.unknowns = {"omega", "D"};
  auto form = [](const std::string& name, double cw, double cd) {
    LinearForm f;
    f.name = name;
    f.coeffs = Eigen::Vector2d(cw, cd);
    return f;
  };
  p.forms = {
      form("2D", 0, 2),
      form("omega-3D", 1, -3),
      form("omega-D", 1, -1),
      form("omega+D", 1, 1),
      form("omega+3D", 1, 3),
      form("2omega", 2, 0),
  };
  return p;
}

ParameterPattern ParameterPattern::three_spin_sm() {
  ParameterPattern p;
  p.unknowns = {"D12", "D13", "D23"};
  p.exchangeable_unknowns = true;
  auto form = [](const std::string& name, double a, double b, double c, bool flip) {
    LinearForm f;
    f.name = name;
    f.coeffs = Eigen::Vector3d(a, b, c);
    f.allow_sign_flip = flip;
    return f;
  };
  p.forms = {
      form("(D12+D13)/2", 0.5, 0.5, 0.0, false),
      form("(D12+D23)/2", 0.5, 0.0, 0.5, false),
      form("(D13+D23)/2", 0.0, 0.5, 0.5, false),
      form("(D12-D13)/2", 0.5, -0.5, 0.0, true),
      form("(D12-D23)/2", 0.5, 0.0, -0.5, true),
      form("(D13-D23)/2", 0.0, 0.5, -0.5, true),
  };
  return p;
}

ParameterPattern ParameterPattern::by_name(const std::string& name) {
  if (name == "two_spin") return two_spin();
  if (name == "three_spin_sm") return three_spin_sm();
  throw std::invalid_argument("unknown parameter pattern: " + name);
}

namespace {

struct Candidate {
  double residual = std::numeric_limits<double>::infinity();
  int flips = 0;
  Eigen::VectorXd values;
  std::vector<int> form_of_beta;
  std::vector<int> sign_of_beta;
  bool valid = false;
};

// Tie tolerance: exact relabelings of an exchangeable pattern produce
// identical residuals up to rounding.
bool better(const Candidate& cand, const Candidate& best, double tol) {
  if (!best.valid) return true;
  if (cand.residual < best.residual - tol) return true;
  if (cand.residual > best.residual + tol) return false;
  if (cand.flips != best.flips) return cand.flips < best.flips;
  // canonical tie-break: lexicographically descending value vector
  for (Eigen::Index i = 0; i < cand.values.size(); ++i) {
    if (cand.values[i] != best.values[i]) return cand.values[i] > best.values[i];
  }
  return false;
}

void enumerate(const std::vector<double>& betas, const ParameterPattern& pattern,
               size_t bi, std::vector<int>& form_of_beta, std::vector<int>& sign_of_beta,
               std::vector<bool>& used, double tie_tol, Candidate& best) {
  const size_t nb = betas.size();
  if (bi == nb) {
    const auto nu = static_cast<Eigen::Index>(pattern.unknowns.size());
    Eigen::MatrixXd a(static_cast<Eigen::Index>(nb), nu);
    Eigen::VectorXd y(static_cast<Eigen::Index>(nb));
    for (size_t k = 0; k < nb; ++k) {
      a.row(static_cast<Eigen::Index>(k)) =
          double(sign_of_beta[k]) *
          pattern.forms[static_cast<size_t>(form_of_beta[k])].coeffs.transpose();
      y[static_cast<Eigen::Index>(k)] = betas[k];
    }
    Eigen::VectorXd sol = a.colPivHouseholderQr().solve(y);
    if (!sol.allFinite() || (sol.array() <= 0).any()) return;  // couplings are positive
    Eigen::VectorXd pred = a * sol;
    if ((pred.array() < -1e-9).any()) return;  // measured betas are magnitudes
    Candidate cand;
    cand.residual = std::sqrt((pred - y).squaredNorm() / double(nb));
    cand.flips = static_cast<int>(std::count(sign_of_beta.begin(), sign_of_beta.end(), -1));
    cand.values = sol;
    cand.form_of_beta = form_of_beta;
    cand.sign_of_beta = sign_of_beta;
    cand.valid = true;
    if (better(cand, best, tie_tol)) best = cand;
    return;
  }
  for (size_t f = 0; f < pattern.forms.size(); ++f) {
    if (used[f]) continue;
    used[f] = true;
    form_of_beta[bi] = static_cast<int>(f);
    sign_of_beta[bi] = 1;
    enumerate(betas, pattern, bi + 1, form_of_beta, sign_of_beta, used, tie_tol, best);
    if (pattern.forms[f].allow_sign_flip) {
      sign_of_beta[bi] = -1;
      enumerate(betas, pattern, bi + 1, form_of_beta, sign_of_beta, used, tie_tol, best);
    }
    used[f] = false;
  }
}

// Injective minimum-deviation assignment of betas to signed forms for a
// fixed parameter vector (used to rebuild the report after relabeling).
void assign_for_values(const std::vector<double>& betas, const ParameterPattern& pattern,
                       const Eigen::VectorXd& values, std::vector<int>& form_of_beta,
                       std::vector<int>& sign_of_beta) {
  const size_t nb = betas.size();
  std::vector<bool> used(pattern.forms.size(), false);
  std::vector<int> fob(nb, -1), sob(nb, 1);
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> best_f, best_s;
  std::function<void(size_t, double)> rec = [&](size_t bi, double cost) {
    if (cost >= best_cost) return;
    if (bi == nb) {
      best_cost = cost;
      best_f = fob;
      best_s = sob;
      return;
    }
    for (size_t f = 0; f < pattern.forms.size(); ++f) {
      if (used[f]) continue;
      for (int s : {1, -1}) {
        if (s < 0 && !pattern.forms[f].allow_sign_flip) continue;
        double pred = s * pattern.forms[f].coeffs.dot(values);
        if (pred < -1e-9) continue;
        used[f] = true;
        fob[bi] = static_cast<int>(f);
        sob[bi] = s;
        double d = pred - betas[bi];
        rec(bi + 1, cost + d * d);
        used[f] = false;
      }
    }
  };
  rec(0, 0.0);
  form_of_beta = best_f;
  sign_of_beta = best_s;
}

}  // namespace

MatchResult match_parameters(const std::vector<BetaEstimate>& betas,
                             const ParameterPattern& pattern,
                             const std::optional<Eigen::VectorXd>& truth_rad_s) {
  const size_t nu = pattern.unknowns.size();
  if (betas.size() < nu) {
    throw std::invalid_argument("match_parameters: fewer betas than unknowns");
  }
  if (betas.size() > pattern.forms.size()) {
    throw std::invalid_argument("match_parameters: more betas than candidate forms");
  }
  // Sorted input keeps the enumeration (and tie-breaks) independent of the
  // caller's ordering.
  std::vector<double> vals;
  vals.reserve(betas.size());
  for (const auto& b : betas) vals.push_back(b.beta_rad_s);
  std::sort(vals.begin(), vals.end());
  double scale = vals.empty() ? 1.0 : std::max(1.0, std::abs(vals.back()));

  Candidate best;
  std::vector<int> form_of_beta(vals.size(), -1), sign_of_beta(vals.size(), 1);
  std::vector<bool> used(pattern.forms.size(), false);
  enumerate(vals, pattern, 0, form_of_beta, sign_of_beta, used, 1e-9 * scale, best);
  if (!best.valid) {
    throw std::runtime_error("match_parameters: no feasible assignment");
  }

  Eigen::VectorXd values = best.values;
  std::vector<int> fob = best.form_of_beta, sob = best.sign_of_beta;
  if (pattern.exchangeable_unknowns) {
    // Spectral data cannot tell the labels apart; report the canonical
    // descending order and rebuild the assignment for those labels.
    Eigen::VectorXd sorted = values;
    std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<double>());
    if (sorted != values) {
      values = sorted;
      assign_for_values(vals, pattern, values, fob, sob);
    }
  }

  MatchResult res;
  res.values_rad_s = values;
  res.residual_rms_rad_s = best.residual;
  for (size_t k = 0; k < vals.size(); ++k) {
    const LinearForm& f = pattern.forms[static_cast<size_t>(fob[k])];
    Assignment a;
    a.beta_rad_s = vals[k];
    a.matched_form = (sob[k] < 0 ? "-(" + f.name + ")" : f.name);
    a.predicted_rad_s = double(sob[k]) * f.coeffs.dot(values);
    res.assignment.push_back(a);
  }
  if (truth_rad_s) {
    if (truth_rad_s->size() != static_cast<Eigen::Index>(nu)) {
      throw std::invalid_argument("match_parameters: truth size mismatch");
    }
    Eigen::VectorXd truth = *truth_rad_s;
    if (pattern.exchangeable_unknowns) {
      std::sort(truth.data(), truth.data() + truth.size(), std::greater<double>());
    }
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
      res.error_pct.push_back(100.0 * std::abs(res.values_rad_s[i] - truth[i]) /
                              std::abs(truth[i]));
    }
  }
  return res;
}

}  // namespace chanspec
