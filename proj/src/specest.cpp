#include "chanspec/specest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace chanspec {

namespace {

CMat hankel(const std::vector<double>& y, int rows, int cols) {
  CMat out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out(i, j) = y[static_cast<size_t>(i + j)];
    }
  }
  return out;
}

CMat vandermonde(const std::vector<Complex>& poles, int n) {
  CMat v(n, static_cast<Eigen::Index>(poles.size()));
  for (size_t j = 0; j < poles.size(); ++j) {
    Complex acc = 1.0;
    for (int m = 0; m < n; ++m) {
      v(m, static_cast<Eigen::Index>(j)) = acc;
      acc *= poles[j];
    }
  }
  return v;
}

double fit_rms(const CMat& basis, const Eigen::VectorXd& y, CVec* coeffs = nullptr) {
  CVec c = lstsq(basis, y.cast<Complex>());
  if (coeffs) *coeffs = c;
  return std::sqrt((basis * c - y.cast<Complex>()).squaredNorm() / double(y.size()));
}

}  // namespace

EstimatedSpectrum matrix_pencil(const FrequencySeries& signal, const PencilConfig& cfg) {
  const int n = static_cast<int>(signal.values.size());
  if (n < 4) {
    throw std::invalid_argument("matrix_pencil: signal too short");
  }
  int L = cfg.pencil_l > 0 ? cfg.pencil_l : n / 3;
  L = std::min(L, n - 2);
  if (L < 1) {
    throw std::invalid_argument("matrix_pencil: invalid pencil parameter");
  }
  const int rows = n - L;
  CMat y = hankel(signal.values, rows, L + 1);
  Svd dec = svd(y);

  int order;
  if (cfg.fixed_order > 0) {
    order = cfg.fixed_order;
    if (order > std::min(rows, L + 1)) {
      throw std::invalid_argument("matrix_pencil: model order exceeds pencil rank");
    }
  } else {
    double cutoff = cfg.sv_ratio * dec.singular_values[0];
    if (cfg.noise_floor) cutoff = std::max(cutoff, *cfg.noise_floor);
    order = 0;
    for (Eigen::Index j = 0; j < dec.singular_values.size(); ++j) {
      if (dec.singular_values[j] > cutoff) ++order;
    }
    order = std::max(order, 1);
  }
  order = std::min(order, L);

  // Signal-subspace pencil: right singular vectors with last/first row removed.
  CMat vk = dec.v.leftCols(order);
  CMat y1 = vk.topRows(L);
  CMat y2 = vk.bottomRows(L);
  CMat z = lstsq(y1, y2);
  EigPair zeig = eig_general(z);

  std::vector<Complex> raw(zeig.values.data(), zeig.values.data() + zeig.values.size());

  EstimatedSpectrum out;
  out.model_order = order;
  // Channel spectra live in the closed unit disk; anything clearly outside
  // is a noise artifact.
  std::vector<Complex> kept;
  for (Complex p : raw) {
    if (std::abs(p) > 1.05) {
      out.discarded.push_back(p);
    } else {
      kept.push_back(p);
    }
  }
  // Deduplicate near-identical poles.
  std::vector<Complex> uniq;
  for (Complex p : kept) {
    bool dup = false;
    for (Complex q : uniq) {
      if (std::abs(p - q) < 1e-9) { dup = true; break; }
    }
    if (!dup) uniq.push_back(p);
  }
  // Symmetrize conjugate pairs: real signals have conjugate-closed pole sets.
  std::vector<bool> used(uniq.size(), false);
  std::vector<Complex> sym;
  for (size_t i = 0; i < uniq.size(); ++i) {
    if (used[i]) continue;
    if (std::abs(uniq[i].imag()) < 1e-12) {
      sym.push_back(Complex(uniq[i].real(), 0.0));
      used[i] = true;
      continue;
    }
    size_t best = i;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < uniq.size(); ++j) {
      if (j == i || used[j]) continue;
      double dist = std::abs(uniq[j] - std::conj(uniq[i]));
      if (dist < best_dist) { best_dist = dist; best = j; }
    }
    if (best != i && best_dist < 1e-3) {
      Complex avg = 0.5 * (uniq[i] + std::conj(uniq[best]));
      sym.push_back(avg);
      sym.push_back(std::conj(avg));
      used[i] = used[best] = true;
    } else {
      sym.push_back(uniq[i]);
      used[i] = true;
    }
  }

  AmplitudeFit amps = ls_amplitudes(signal, sym);
  out.residual_rms = amps.residual_rms;
  for (size_t j = 0; j < sym.size(); ++j) {
    EstimatedPole ep;
    ep.pole = sym[j];
    ep.amplitude = amps.amplitudes[j];
    ep.phase_rad = std::arg(sym[j]);
    ep.phase_deg = ep.phase_rad * 180.0 / M_PI;
    ep.magnitude = std::abs(sym[j]);
    out.poles.push_back(ep);
  }
  std::sort(out.poles.begin(), out.poles.end(), [](const auto& a, const auto& b) {
    if (a.phase_deg != b.phase_deg) return a.phase_deg < b.phase_deg;
    return a.magnitude < b.magnitude;
  });
  return out;
}

AmplitudeFit ls_amplitudes(const FrequencySeries& signal, const std::vector<Complex>& poles) {
  if (poles.empty()) {
    throw std::invalid_argument("ls_amplitudes: empty pole set");
  }
  for (size_t i = 0; i < poles.size(); ++i) {
    for (size_t j = i + 1; j < poles.size(); ++j) {
      if (std::abs(poles[i] - poles[j]) <= 1e-10) {
        throw std::invalid_argument("ls_amplitudes: poles must be pairwise distinct");
      }
    }
  }
  const int n = static_cast<int>(signal.values.size());
  CMat v = vandermonde(poles, n);
  {
    Svd dec = svd(v);
    double smin = dec.singular_values[dec.singular_values.size() - 1];
    if (smin <= 0 || dec.singular_values[0] / smin > 1e12) {
      throw std::runtime_error("ls_amplitudes: ill-conditioned Vandermonde system");
    }
  }
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(signal.values.data(), n);
  CVec c;
  AmplitudeFit fit;
  fit.residual_rms = fit_rms(v, y, &c);
  fit.amplitudes.assign(c.data(), c.data() + c.size());
  return fit;
}

DftSpectrum dft_spectrum(const FrequencySeries& signal) {
  const int n = static_cast<int>(signal.values.size());
  if (n < 2) {
    throw std::invalid_argument("dft_spectrum: need at least two samples");
  }
  double mean = 0;
  for (double v : signal.values) mean += v;
  mean /= n;

  DftSpectrum out;
  const int nbins = n / 2 + 1;
  out.frequency.resize(nbins);
  out.magnitude.resize(nbins);
  for (int k = 0; k < nbins; ++k) {
    Complex acc = 0;
    for (int m = 0; m < n; ++m) {
      double ang = -2.0 * M_PI * double(k) * double(m) / double(n);
      acc += (signal.values[static_cast<size_t>(m)] - (k == 0 ? 0.0 : mean)) *
             Complex(std::cos(ang), std::sin(ang));
    }
    out.frequency[k] = double(k) / double(n);
    out.magnitude[k] = std::abs(acc) / double(n);
  }
  for (int k = 1; k + 1 < nbins; ++k) {
    if (out.magnitude[k] > out.magnitude[k - 1] && out.magnitude[k] > out.magnitude[k + 1] &&
        out.magnitude[k] > 1e-12) {
      out.peak_frequencies.push_back(out.frequency[k]);
    }
  }
  return out;
}

namespace {

// Levenberg-Marquardt on the variable-projection residual: linear
// amplitudes are solved by least squares inside the residual evaluation.
struct VarProResult {
  Eigen::VectorXd theta;
  double rms = 0.0;
  bool converged = false;
};

VarProResult levenberg_marquardt(
    const std::function<CMat(const Eigen::VectorXd&)>& basis_of,
    const Eigen::VectorXd& y, Eigen::VectorXd theta) {
  auto rms_of = [&](const Eigen::VectorXd& th) {
    return fit_rms(basis_of(th), y);
  };
  const int p = static_cast<int>(theta.size());
  double lambda = 1e-3;
  double current = rms_of(theta);
  const double eps = 1e-7;
  for (int iter = 0; iter < 200; ++iter) {
    // Numeric Jacobian of the scalar-rms is not enough; use residual vector.
    CVec c;
    CMat basis = basis_of(theta);
    fit_rms(basis, y, &c);
    Eigen::VectorXd resid = (basis * c).real() - y;
    Eigen::MatrixXd jac(y.size(), p);
    for (int k = 0; k < p; ++k) {
      Eigen::VectorXd th2 = theta;
      th2[k] += eps;
      CMat b2 = basis_of(th2);
      CVec c2;
      fit_rms(b2, y, &c2);
      Eigen::VectorXd r2 = (b2 * c2).real() - y;
      jac.col(k) = (r2 - resid) / eps;
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * resid;
    bool improved = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda * (jtj.diagonal().array().abs() + 1e-12);
      Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      Eigen::VectorXd cand = theta + step;
      double rms = rms_of(cand);
      if (rms < current) {
        theta = cand;
        double rel = (current - rms) / std::max(current, 1e-300);
        current = rms;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (rel < 1e-12 || current < 1e-14) {
          return {theta, current, true};
        }
        break;
      }
      lambda *= 6.0;
    }
    if (!improved) {
      return {theta, current, true};
    }
  }
  return {theta, current, false};
}

double clamp_pole(double x) { return std::max(-0.999999, std::min(0.999999, x)); }

}  // namespace

EpModelFit ep_model_fit(const FrequencySeries& signal) {
  const int n = static_cast<int>(signal.values.size());
  if (n < 16) {
    throw std::invalid_argument("ep_model_fit: signal too short");
  }
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(signal.values.data(), n);

  // Seed from the matrix pencil: dominant non-constant pole(s).
  PencilConfig pcfg;
  pcfg.sv_ratio = 1e-10;
  EstimatedSpectrum mp = matrix_pencil(signal, pcfg);
  double rho0 = 0.5, phase0 = 0.5, real0 = 0.5, real1 = -0.3;
  {
    const EstimatedPole* best_cplx = nullptr;
    std::vector<double> reals;
    for (const auto& p : mp.poles) {
      if (std::abs(p.pole - 1.0) < 1e-3) continue;  // constant background
      if (std::abs(p.pole.imag()) > 1e-6) {
        if (p.phase_rad > 0 && (!best_cplx || std::abs(p.amplitude) > std::abs(best_cplx->amplitude))) {
          best_cplx = &p;
        }
      } else {
        reals.push_back(p.pole.real());
      }
    }
    if (best_cplx) {
      rho0 = std::abs(best_cplx->pole);
      phase0 = best_cplx->phase_rad;
    } else if (!reals.empty()) {
      rho0 = std::abs(reals.front());
      phase0 = 0.05;
    }
    std::sort(reals.begin(), reals.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    if (reals.size() >= 2) { real0 = reals[0]; real1 = reals[1]; }
    else if (reals.size() == 1) { real0 = reals[0]; real1 = 0.5 * reals[0]; }
    else { real0 = rho0; real1 = 0.9 * rho0; }
  }

  auto pow_col = [n](double r, int shift) {
    Eigen::VectorXcd col(n);
    for (int m = 0; m < n; ++m) {
      int e = m + shift;
      col[m] = e < 0 ? 0.0 : std::pow(r, e);
    }
    return col;
  };

  // Model bases; columns always include the constant (fixed-point) term.
  auto basis_two_real = [&](const Eigen::VectorXd& th) {
    CMat b(n, 3);
    b.col(0).setOnes();
    b.col(1) = pow_col(clamp_pole(th[0]), 0);
    b.col(2) = pow_col(clamp_pole(th[1]), 0);
    return b;
  };
  auto basis_pair = [&](const Eigen::VectorXd& th) {
    double rho = std::abs(clamp_pole(th[0]));
    double ph = th[1];
    CMat b(n, 3);
    for (int m = 0; m < n; ++m) {
      double damp = std::pow(rho, m);
      b(m, 0) = 1.0;
      b(m, 1) = damp * std::cos(m * ph);
      b(m, 2) = damp * std::sin(m * ph);
    }
    return b;
  };
  auto basis_ep = [&](const Eigen::VectorXd& th) {
    double lam = clamp_pole(th[0]);
    CMat b(n, 3);
    b.col(0).setOnes();
    b.col(1) = pow_col(lam, 0);
    for (int m = 0; m < n; ++m) {
      b(m, 2) = m * std::pow(lam, std::max(0, m - 1));
    }
    return b;
  };

  Eigen::VectorXd th_two(2); th_two << real0, real1;
  Eigen::VectorXd th_pair(2); th_pair << rho0, phase0;
  Eigen::VectorXd th_ep(1); th_ep << (std::abs(real0) + rho0) / 2.0;

  VarProResult two = levenberg_marquardt(basis_two_real, y, th_two);
  VarProResult pair = levenberg_marquardt(basis_pair, y, th_pair);
  VarProResult ep = levenberg_marquardt(basis_ep, y, th_ep);

  EpModelFit fit;
  fit.residuals[0] = two.rms;
  fit.residuals[1] = pair.rms;
  fit.residuals[2] = ep.rms;
  fit.r1 = clamp_pole(two.theta[0]);
  fit.r2 = clamp_pole(two.theta[1]);
  fit.rho = std::abs(clamp_pole(pair.theta[0]));
  fit.pair_phase = pair.theta[1];
  fit.lambda = clamp_pole(ep.theta[0]);

  // Complexity penalty: the EP model has one nonlinear parameter fewer, so
  // prefer it unless a 4-parameter model is clearly better.
  const double penalty = 1.05;
  double score_two = two.rms * penalty;
  double score_pair = pair.rms * penalty;
  double score_ep = ep.rms;

  if (score_ep <= score_two && score_ep <= score_pair) {
    fit.selected = EpModelKind::SecondOrderEP;
    fit.residual_rms = ep.rms;
  } else if (score_pair <= score_two) {
    fit.selected = EpModelKind::ConjugatePairOscillation;
    fit.residual_rms = pair.rms;
  } else {
    fit.selected = EpModelKind::TwoRealExponentials;
    fit.residual_rms = two.rms;
  }

  // Coalescence reclassification: a pair with vanishing phase or two reals
  // that have merged are the EP case in disguise.
  constexpr double kCoalesceTol = 0.02;
  if (fit.selected == EpModelKind::ConjugatePairOscillation &&
      std::abs(std::remainder(fit.pair_phase, M_PI)) < kCoalesceTol) {
    fit.selected = EpModelKind::SecondOrderEP;
    fit.lambda = fit.rho;
    fit.residual_rms = ep.rms;
  } else if (fit.selected == EpModelKind::TwoRealExponentials &&
             std::abs(fit.r1 - fit.r2) < kCoalesceTol) {
    fit.selected = EpModelKind::SecondOrderEP;
    fit.lambda = 0.5 * (fit.r1 + fit.r2);
    fit.residual_rms = ep.rms;
  }
  if (std::isnan(fit.residual_rms) || (two.rms > 0.5 && pair.rms > 0.5 && ep.rms > 0.5)) {
    throw std::runtime_error("ep_model_fit: all model fits diverged");
  }
  return fit;
}

}  // namespace chanspec
