#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "hjmcal/errors.hpp"
#include "hjmcal/term.hpp"

namespace hjmcal {

namespace {

constexpr double kTimeTol = 1e-12;

bool close(double a, double b) { return std::abs(a - b) <= kTimeTol * std::max(1.0, std::abs(b)); }

// Sup-norm distance between two piecewise-constant curves, sampled at piece
// midpoints of the union of their breakpoints plus the outer tails.
double sup_distance(const PiecewiseConstant& a, const PiecewiseConstant& b) {
  std::vector<double> pts;
  for (double x : a.breakpoints()) pts.push_back(x);
  for (double x : b.breakpoints()) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double d = 0.0;
  if (pts.empty()) return std::abs(a(0.0) - b(0.0));
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double t = 0.5 * (pts[i] + pts[i + 1]);
    d = std::max(d, std::abs(a(t) - b(t)));
  }
  d = std::max(d, std::abs(a(pts.front() - 1.0) - b(pts.front() - 1.0)));
  d = std::max(d, std::abs(a(pts.back() + 1.0) - b(pts.back() + 1.0)));
  return d;
}

double max_rel_residual(const std::vector<SmileSpec>& smiles, const SmileGrouping& grp,
                        const LscModel& m, const TermCorrection& corr) {
  double worst = 0.0;
  const auto visit = [&](int idx) {
    const SmileSpec& s = smiles[static_cast<size_t>(idx)];
    const double model = vs_price(m, corr, s.window, s.maturity);
    worst = std::max(worst, std::abs(model - s.vs) / s.vs);
  };
  for (int idx : grp.g_group) visit(idx);
  for (int idx : grp.h_group) visit(idx);
  return worst;
}

// Midpoint/value nodes of the bounded pieces of a piecewise-constant curve.
// For observation weights the leading piece starts at zero, so it is kept;
// for delivery weights both unbounded tails are padding and are dropped.
// With anchor_ends the curve is pinned to the neutral value 1 at the span
// boundaries, matching the piecewise padding; without it the calibrated span
// is rendered faithfully but every variance integral becomes invariant under
// the rescaling (c*h, g/c), so the anchored form is required whenever piece
// values are re-solved against the smoothed curves.
Pchip smooth_curve(const PiecewiseConstant& pc, bool leading_from_zero, bool anchor_ends) {
  const auto& bp = pc.breakpoints();
  const auto& vals = pc.values();
  std::vector<double> x, y;
  if (bp.empty()) return Pchip(vals.empty() ? 1.0 : vals.front());
  if (leading_from_zero && bp.front() > 0.0) {
    x.push_back(0.5 * bp.front());
    y.push_back(vals.front());
  } else if (anchor_ends) {
    x.push_back(bp.front());
    y.push_back(1.0);
  }
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    x.push_back(0.5 * (bp[i] + bp[i + 1]));
    y.push_back(vals[i + 1]);
  }
  if (anchor_ends) {
    x.push_back(bp.back());
    y.push_back(1.0);
  }
  if (x.empty()) return Pchip(leading_from_zero ? vals.front() : 1.0);
  if (x.size() == 1) return Pchip(y.front());
  return Pchip(x, y);
}

struct GContractRef {
  int smile = 0;
  double duration = 0.0;
  std::vector<size_t> pieces;  // value indices in the g curve owned by this contract
};

// Reconstruct which g-curve value slots belong to which contract: a slot is
// owned by the smallest-duration contract covering it.
std::vector<GContractRef> g_ownership(const PiecewiseConstant& g, const SmileGrouping& grp,
                                      const std::vector<SmileSpec>& smiles) {
  std::vector<GContractRef> refs;
  for (int idx : grp.g_group)
    refs.push_back({idx, smiles[static_cast<size_t>(idx)].window.duration(), {}});
  std::sort(refs.begin(), refs.end(), [&](const GContractRef& a, const GContractRef& b) {
    if (!close(a.duration, b.duration)) return a.duration < b.duration;
    return smiles[static_cast<size_t>(a.smile)].window.ts <
           smiles[static_cast<size_t>(b.smile)].window.ts;
  });
  const auto& bp = g.breakpoints();
  for (size_t p = 0; p + 1 < bp.size(); ++p) {
    for (auto& r : refs) {
      const Window& w = smiles[static_cast<size_t>(r.smile)].window;
      if (bp[p] >= w.ts - kTimeTol && bp[p + 1] <= w.te + kTimeTol) {
        r.pieces.push_back(p + 1);  // value index for [bp[p], bp[p+1])
        break;
      }
    }
  }
  return refs;
}

// Re-solve piece values so the smoothed curves reproduce the VS targets.
void resolve_smoothed(TermCorrection& corr, const SmileGrouping& grp,
                      const std::vector<SmileSpec>& smiles, const LscModel& m,
                      const TermFitOptions& opt, FixedPointLog* log) {
  struct HS {
    double T;
    int idx;
    size_t value_slot;
  };
  std::vector<HS> hs;
  {
    std::vector<std::pair<double, int>> tmp;
    for (int idx : grp.h_group) tmp.push_back({smiles[static_cast<size_t>(idx)].maturity, idx});
    std::sort(tmp.begin(), tmp.end());
    for (size_t k = 0; k < tmp.size(); ++k) hs.push_back({tmp[k].first, tmp[k].second, k});
  }
  const auto g_refs = g_ownership(corr.g, grp, smiles);

  const auto apply_smooth = [&]() {
    corr.g_smooth = smooth_curve(corr.g, false, /*anchor_ends=*/true);
    corr.h_smooth = smooth_curve(corr.h, true, /*anchor_ends=*/true);
  };
  const auto model_vs = [&](const SmileSpec& s, double t0, double t1) {
    return vs_integral(
        m, s.window, [&](double T) { return corr.g_smooth(T); },
        [&](double t) { return corr.h_smooth(t); }, t0, t1);
  };

  apply_smooth();
  double worst = max_rel_residual(smiles, grp, m, corr);
  int sweep = 0;
  while (worst > opt.smooth_tol) {
    if (++sweep > opt.smooth_max_iter)
      throw NoConvergence("smoothed term-structure re-solve stalled at relative residual " +
                          std::to_string(worst));
    // Observation weights first, earliest maturity outward.
    for (const HS& e : hs) {
      const SmileSpec& s = smiles[static_cast<size_t>(e.idx)];
      const double t_prev = (e.value_slot == 0) ? 0.0 : hs[e.value_slot - 1].T;
      const double prefix = model_vs(s, 0.0, t_prev);
      const double inc_target = s.vs - prefix;
      if (!(inc_target > 0.0))
        throw NegativeIncrement("smoothed observation weights need a non-positive increment for " +
                                s.label);
      const double inc_model = model_vs(s, t_prev, e.T);
      corr.h.values()[e.value_slot] *= std::sqrt(inc_target / inc_model);
      apply_smooth();
    }
    // Delivery weights, smallest contract outward.
    for (const auto& r : g_refs) {
      const SmileSpec& s = smiles[static_cast<size_t>(r.smile)];
      const double model = model_vs(s, 0.0, s.maturity);
      const double ratio = std::sqrt(s.vs / model);
      for (size_t slot : r.pieces) corr.g.values()[slot] *= ratio;
      apply_smooth();
    }
    corr.validate();
    worst = max_rel_residual(smiles, grp, m, corr);
  }
  if (log) log->max_rel_residual = worst;
}

}  // namespace

TermCorrection fixed_point(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles,
                           const LscModel& m, const TermFitOptions& opt, FixedPointLog* log) {
  validate_grouping(grp, smiles);
  if (log) *log = FixedPointLog{};

  TermCorrection corr;
  PiecewiseConstant g_prev;  // constant one
  std::vector<std::string> warnings;
  bool converged = false;
  int iter = 0;
  const double resid_tol = std::max(opt.eps, 1e-10);
  double delta = 0.0, resid = 0.0;
  while (iter < opt.max_iter) {
    ++iter;
    corr.h = strip_h(g_prev, grp, smiles, m);
    corr.g = solve_g(corr.h, grp, smiles, m, &g_prev, &warnings);
    delta = sup_distance(corr.g, g_prev);
    if (log) log->g_delta.push_back(delta);
    g_prev = corr.g;
    if (delta <= opt.eps) {
      // Make the observation-weight targets exact at the final g before
      // declaring success.
      corr.h = strip_h(corr.g, grp, smiles, m);
      resid = max_rel_residual(smiles, grp, m, corr);
      if (resid <= resid_tol) {
        converged = true;
        break;
      }
    }
  }
  if (log) {
    log->iterations = iter;
    log->max_rel_residual = converged ? resid : max_rel_residual(smiles, grp, m, corr);
    log->converged = converged;
    log->warnings = warnings;
  }
  if (!converged)
    throw NoConvergence("term-structure fixed point not converged after " +
                        std::to_string(iter) + " iterations (last step " + std::to_string(delta) +
                        ", worst relative VS residual " +
                        std::to_string(log ? log->max_rel_residual
                                           : max_rel_residual(smiles, grp, m, corr)) +
                        ")");
  corr.validate();
  if (opt.smoothing && (!corr.g.breakpoints().empty() || !corr.h.breakpoints().empty())) {
    corr.smoothed = true;
    resolve_smoothed(corr, grp, smiles, m, opt, log);
  }
  return corr;
}

ExistenceCheck check_existence(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles,
                               const LscModel& m) {
  validate_grouping(grp, smiles);

  // Theorem shape: all observation-weight smiles on one underlying; the
  // delivery-weight contracts must not nest in each other and must sit inside
  // that underlying's delivery window; contract correlations positive.
  if (grp.h_group.empty()) return {ExistenceStatus::Unknown, 0.0};
  const int h_contract = smiles[static_cast<size_t>(grp.h_group.front())].contract;
  for (int idx : grp.h_group)
    if (smiles[static_cast<size_t>(idx)].contract != h_contract)
      return {ExistenceStatus::Unknown, 0.0};
  const Window base = smiles[static_cast<size_t>(grp.h_group.front())].window;

  std::vector<int> gset;
  for (int idx : grp.g_group)
    if (smiles[static_cast<size_t>(idx)].contract != h_contract) gset.push_back(idx);
  for (size_t a = 0; a < gset.size(); ++a) {
    const Window& wa = smiles[static_cast<size_t>(gset[a])].window;
    if (wa.ts < base.ts - kTimeTol || wa.te > base.te + kTimeTol)
      return {ExistenceStatus::Unknown, 0.0};
    for (size_t b = 0; b < gset.size(); ++b) {
      if (a == b) continue;
      const Window& wb = smiles[static_cast<size_t>(gset[b])].window;
      const bool nested = wb.ts >= wa.ts - kTimeTol && wb.te <= wa.te + kTimeTol;
      if (nested) return {ExistenceStatus::Unknown, 0.0};
    }
  }
  if (gset.empty()) return {ExistenceStatus::Holds, 0.0};

  // Observation maturities of the underlying, ascending, with market increments.
  std::vector<std::pair<double, double>> grid;  // (T_k, VS target)
  for (int idx : grp.h_group)
    grid.push_back({smiles[static_cast<size_t>(idx)].maturity, smiles[static_cast<size_t>(idx)].vs});
  std::sort(grid.begin(), grid.end());
  std::vector<double> inc(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    inc[k] = grid[k].second - (k == 0 ? 0.0 : grid[k - 1].second);
    if (!(inc[k] > 0.0)) return {ExistenceStatus::Fails, std::numeric_limits<double>::infinity()};
  }

  // Positive pairwise instantaneous correlations on a sample grid.
  std::vector<Window> wins{base};
  for (int idx : gset) wins.push_back(smiles[static_cast<size_t>(idx)].window);
  double t_max = 0.0;
  for (int idx : grp.h_group) t_max = std::max(t_max, smiles[static_cast<size_t>(idx)].maturity);
  for (int idx : gset) t_max = std::max(t_max, smiles[static_cast<size_t>(idx)].maturity);
  for (int s = 0; s <= 16; ++s) {
    const double t = t_max * (s + 0.5) / 17.5;
    for (size_t a = 0; a < wins.size(); ++a)
      for (size_t b = a + 1; b < wins.size(); ++b)
        if (instantaneous_correlation(m, t, wins[a], wins[b]) <= 0.0)
          return {ExistenceStatus::Unknown, 0.0};
  }

  // Uncorrected per-contract profiles and the delivery-share weights.
  const int P = static_cast<int>(gset.size());
  std::vector<std::vector<ExpSum>> prof(static_cast<size_t>(P));
  Eigen::VectorXd omega(P);
  for (int i = 0; i < P; ++i) {
    const Window& w = smiles[static_cast<size_t>(gset[static_cast<size_t>(i)])].window;
    omega(i) = w.duration() / base.duration();
    auto& pi = prof[static_cast<size_t>(i)];
    pi.resize(static_cast<size_t>(m.n_factors()));
    for (int f = 0; f < m.n_factors(); ++f) pi[static_cast<size_t>(f)] = factor_profile(m, f, w);
  }
  const auto quad = [&](int i, int j, double a, double b) {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    for (int f1 = 0; f1 < m.n_factors(); ++f1)
      for (int f2 = 0; f2 < m.n_factors(); ++f2)
        total += m.R(f1, f2) *
                 integrate_product(prof[static_cast<size_t>(i)][static_cast<size_t>(f1)],
                                   prof[static_cast<size_t>(j)][static_cast<size_t>(f2)], a, b);
    return total;
  };

  // Spectral norms of the interval Gram matrices.
  std::vector<double> qnorm(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    const double a = (k == 0) ? 0.0 : grid[k - 1].first;
    const double b = grid[k].first;
    Eigen::MatrixXd Q(P, P);
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j) Q(i, j) = omega(i) * omega(j) * quad(i, j, a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Q + Q.transpose()));
    qnorm[k] = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(qnorm[k] > 0.0)) return {ExistenceStatus::Unknown, 0.0};
  }

  double lhs = 0.0;
  for (int i = 0; i < P; ++i) {
    const SmileSpec& s = smiles[static_cast<size_t>(gset[static_cast<size_t>(i)])];
    double denom = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
      const double a = (k == 0) ? 0.0 : grid[k - 1].first;
      const double b = std::min(grid[k].first, s.maturity);
      denom += inc[k] / qnorm[k] * quad(i, i, a, b);
    }
    if (!(denom > 0.0)) return {ExistenceStatus::Unknown, 0.0};
    lhs += s.vs / denom;
  }
  return {lhs < 1.0 ? ExistenceStatus::Holds : ExistenceStatus::Fails, lhs};
}

TermCorrection smooth(const TermCorrection& corr) {
  TermCorrection out = corr;
  const bool g_has = corr.g.breakpoints().size() >= 2;
  const bool h_has = !corr.h.breakpoints().empty();
  if (!g_has && !h_has) return out;  // nothing to smooth
  out.smoothed = true;
  out.g_smooth = smooth_curve(corr.g, false, /*anchor_ends=*/false);
  out.h_smooth = smooth_curve(corr.h, true, /*anchor_ends=*/false);
  return out;
}

}  // namespace hjmcal
