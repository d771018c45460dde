#include "hjmcal/term.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hjmcal/errors.hpp"
#include "hjmcal/quadrature.hpp"

namespace hjmcal {

namespace {

constexpr double kTimeTol = 1e-12;

bool close(double a, double b) { return std::abs(a - b) <= kTimeTol * std::max(1.0, std::abs(b)); }

// Per-factor volatility profiles of a delivery window under a piecewise g.
std::vector<ExpSum> window_profiles(const LscModel& m, const Window& w,
                                    const PiecewiseConstant* g) {
  std::vector<ExpSum> out(static_cast<size_t>(m.n_factors()));
  for (int f = 0; f < m.n_factors(); ++f) out[static_cast<size_t>(f)] = factor_profile(m, f, w, g);
  return out;
}

// Integral over [a, b] of pi^T R pj for per-factor profiles.
double quad_form_integral(const LscModel& m, const std::vector<ExpSum>& pi,
                          const std::vector<ExpSum>& pj, double a, double b) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  for (int f1 = 0; f1 < m.n_factors(); ++f1)
    for (int f2 = 0; f2 < m.n_factors(); ++f2)
      total += m.R(f1, f2) * integrate_product(pi[static_cast<size_t>(f1)],
                                               pj[static_cast<size_t>(f2)], a, b);
  return total;
}

// Integral over [t0, t1] of h(t)^2 pi^T R pj, splitting at the h breakpoints.
double weighted_quad_integral(const LscModel& m, const std::vector<ExpSum>& pi,
                              const std::vector<ExpSum>& pj, const PiecewiseConstant& h,
                              double t0, double t1) {
  std::vector<double> cuts{t0};
  for (double b : h.breakpoints())
    if (b > t0 + kTimeTol && b < t1 - kTimeTol) cuts.push_back(b);
  cuts.push_back(t1);
  double total = 0.0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double hv = h(0.5 * (cuts[k] + cuts[k + 1]));
    total += hv * hv * quad_form_integral(m, pi, pj, cuts[k], cuts[k + 1]);
  }
  return total;
}

struct GEntry {
  int smile = 0;     // index into the smile list
  Window window;
  double maturity = 0.0;
  double vs = 0.0;
};

// g-group contracts sorted by (duration, start): any contract owning a piece
// inside another's window comes first.
std::vector<GEntry> g_entries(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles) {
  std::vector<GEntry> out;
  for (int idx : grp.g_group) {
    const SmileSpec& s = smiles[static_cast<size_t>(idx)];
    out.push_back({idx, s.window, s.maturity, s.vs});
  }
  std::sort(out.begin(), out.end(), [](const GEntry& a, const GEntry& b) {
    const double da = a.window.duration(), db = b.window.duration();
    if (!close(da, db)) return da < db;
    return a.window.ts < b.window.ts;
  });
  return out;
}

std::vector<double> g_breakpoints(const std::vector<GEntry>& entries) {
  std::vector<double> pts;
  for (const auto& e : entries) {
    pts.push_back(e.window.ts);
    pts.push_back(e.window.te);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || !close(out.back(), p)) out.push_back(p);
  return out;
}

// Owner of each inter-breakpoint piece: the covering contract that comes first
// in the (duration, start) order; -1 when no contract covers the piece.
std::vector<int> piece_owners(const std::vector<double>& breaks,
                              const std::vector<GEntry>& entries) {
  std::vector<int> owner(breaks.size() > 0 ? breaks.size() - 1 : 0, -1);
  for (size_t p = 0; p + 1 < breaks.size(); ++p) {
    for (size_t c = 0; c < entries.size(); ++c) {
      const Window& w = entries[c].window;
      if (breaks[p] >= w.ts - kTimeTol && breaks[p + 1] <= w.te + kTimeTol) {
        owner[p] = static_cast<int>(c);
        break;
      }
    }
  }
  return owner;
}

// Is target's window coverable exactly by a disjoint chain of other windows?
bool union_representable(const Window& target, const std::vector<Window>& others) {
  std::vector<double> stack{target.ts};
  std::set<long long> seen;
  while (!stack.empty()) {
    const double cur = stack.back();
    stack.pop_back();
    if (close(cur, target.te)) return true;
    const long long key = std::llround(cur * 1e10);
    if (!seen.insert(key).second) continue;
    for (const Window& w : others)
      if (close(w.ts, cur) && w.te <= target.te + kTimeTol) stack.push_back(w.te);
  }
  return false;
}

}  // namespace

void validate_grouping(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles) {
  if (smiles.empty()) throw EmptyInput("no smiles to group");
  std::set<int> used;
  const auto check_index = [&](int idx) {
    if (idx < 0 || idx >= static_cast<int>(smiles.size()))
      throw BadConfig("grouping index out of range");
    if (!used.insert(idx).second) throw BadConfig("smile assigned twice in the grouping");
  };
  std::map<int, Window> window_of;
  for (const SmileSpec& s : smiles) {
    if (!(s.window.te > s.window.ts)) throw BadConfig("smile with empty delivery window");
    if (!(s.maturity > 0.0) || s.maturity > s.window.ts + kTimeTol)
      throw BadConfig("smile maturity must lie in (0, delivery start]");
    if (!(s.vs > 0.0)) throw BadConfig("smile VS target must be positive");
    auto [it, inserted] = window_of.emplace(s.contract, s.window);
    if (!inserted && (!close(it->second.ts, s.window.ts) || !close(it->second.te, s.window.te)))
      throw BadConfig("contract id maps to two different delivery windows");
  }

  // Rule 1: at most one g smile per contract.
  std::set<int> g_contracts;
  for (int idx : grp.g_group) {
    check_index(idx);
    if (!g_contracts.insert(smiles[static_cast<size_t>(idx)].contract).second)
      throw NoValidGrouping("two delivery-weight smiles on one contract");
  }
  // Rule 3: distinct maturities in the h group.
  std::vector<double> hmat;
  for (int idx : grp.h_group) {
    check_index(idx);
    hmat.push_back(smiles[static_cast<size_t>(idx)].maturity);
  }
  std::sort(hmat.begin(), hmat.end());
  for (size_t i = 1; i < hmat.size(); ++i)
    if (close(hmat[i - 1], hmat[i]))
      throw NoValidGrouping("two observation-weight smiles share a maturity");
  // Rule 2: no g delivery period is a disjoint union of other g periods.
  for (size_t i = 0; i < grp.g_group.size(); ++i) {
    std::vector<Window> others;
    for (size_t j = 0; j < grp.g_group.size(); ++j)
      if (j != i) others.push_back(smiles[static_cast<size_t>(grp.g_group[j])].window);
    if (union_representable(smiles[static_cast<size_t>(grp.g_group[i])].window, others))
      throw NoValidGrouping("a delivery period equals a union of other delivery periods");
  }
}

namespace {

bool grouping_valid(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles) {
  try {
    validate_grouping(grp, smiles);
    return true;
  } catch (const NoValidGrouping&) {
    return false;
  }
}

SmileGrouping from_labels(const std::vector<bool>& in_g) {
  SmileGrouping grp;
  for (size_t i = 0; i < in_g.size(); ++i)
    (in_g[i] ? grp.g_group : grp.h_group).push_back(static_cast<int>(i));
  return grp;
}

}  // namespace

SmileGrouping assign_groups(const std::vector<SmileSpec>& smiles) {
  if (smiles.empty()) throw EmptyInput("no smiles to group");
  const int n = static_cast<int>(smiles.size());

  // Default policy: month/quarter contracts to g (latest maturity when a
  // contract has several smiles), the rest to h.
  std::vector<bool> in_g(static_cast<size_t>(n), false);
  std::map<int, int> g_pick;  // contract -> smile index
  for (int i = 0; i < n; ++i) {
    const SmileSpec& s = smiles[static_cast<size_t>(i)];
    if (s.kind != ContractKind::Month && s.kind != ContractKind::Quarter) continue;
    auto it = g_pick.find(s.contract);
    if (it == g_pick.end() ||
        s.maturity > smiles[static_cast<size_t>(it->second)].maturity)
      g_pick[s.contract] = i;
  }
  for (const auto& [contract, idx] : g_pick) in_g[static_cast<size_t>(idx)] = true;

  const auto g_windows_except = [&](int skip) {
    std::vector<Window> out;
    for (int i = 0; i < n; ++i)
      if (in_g[static_cast<size_t>(i)] && i != skip) out.push_back(smiles[static_cast<size_t>(i)].window);
    return out;
  };

  // Repair pass 1: drop union-representable deliveries from g (largest first);
  // their variance is already spanned by the finer contracts.
  std::vector<int> g_desc;
  for (int i = 0; i < n; ++i)
    if (in_g[static_cast<size_t>(i)]) g_desc.push_back(i);
  std::sort(g_desc.begin(), g_desc.end(), [&](int a, int b) {
    return smiles[static_cast<size_t>(a)].window.duration() >
           smiles[static_cast<size_t>(b)].window.duration();
  });
  for (int i : g_desc)
    if (union_representable(smiles[static_cast<size_t>(i)].window, g_windows_except(i)))
      in_g[static_cast<size_t>(i)] = false;

  // Repair pass 2: resolve duplicate h maturities by promoting one of the
  // clashing smiles to g, preferring the contract with the most other h
  // smiles, when that keeps the g rules intact.
  const auto h_count = [&](int contract) {
    int c = 0;
    for (int i = 0; i < n; ++i)
      if (!in_g[static_cast<size_t>(i)] && smiles[static_cast<size_t>(i)].contract == contract) ++c;
    return c;
  };
  const auto g_has_contract = [&](int contract) {
    for (int i = 0; i < n; ++i)
      if (in_g[static_cast<size_t>(i)] && smiles[static_cast<size_t>(i)].contract == contract)
        return true;
    return false;
  };
  for (int pass = 0; pass < n; ++pass) {
    int a = -1, b = -1;
    for (int i = 0; i < n && a < 0; ++i) {
      if (in_g[static_cast<size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (in_g[static_cast<size_t>(j)]) continue;
        if (close(smiles[static_cast<size_t>(i)].maturity, smiles[static_cast<size_t>(j)].maturity)) {
          a = i;
          b = j;
          break;
        }
      }
    }
    if (a < 0) break;
    std::vector<int> cand{a, b};
    std::sort(cand.begin(), cand.end(), [&](int x, int y) {
      return h_count(smiles[static_cast<size_t>(x)].contract) >
             h_count(smiles[static_cast<size_t>(y)].contract);
    });
    bool moved = false;
    for (int c : cand) {
      const SmileSpec& s = smiles[static_cast<size_t>(c)];
      if (g_has_contract(s.contract)) continue;
      if (union_representable(s.window, g_windows_except(-1))) continue;
      bool breaks_other = false;
      for (int i = 0; i < n && !breaks_other; ++i)
        if (in_g[static_cast<size_t>(i)]) {
          auto others = g_windows_except(i);
          others.push_back(s.window);
          breaks_other = union_representable(smiles[static_cast<size_t>(i)].window, others);
        }
      if (breaks_other) continue;
      in_g[static_cast<size_t>(c)] = true;
      moved = true;
      break;
    }
    if (!moved) break;
  }

  SmileGrouping grp = from_labels(in_g);
  if (grouping_valid(grp, smiles)) return grp;

  // Bounded fallback: search nearby assignments by flip count.
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  for (int flips = 1; flips <= std::min(n, 4); ++flips) {
    std::vector<int> pick(static_cast<size_t>(flips), 0);
    const std::function<bool(int, int)> rec = [&](int pos, int start) {
      if (pos == flips) {
        std::vector<bool> trial = in_g;
        for (int k : pick) trial[static_cast<size_t>(k)] = !trial[static_cast<size_t>(k)];
        SmileGrouping t = from_labels(trial);
        if (grouping_valid(t, smiles)) {
          grp = t;
          return true;
        }
        return false;
      }
      for (int i = start; i < n; ++i) {
        pick[static_cast<size_t>(pos)] = i;
        if (rec(pos + 1, i + 1)) return true;
      }
      return false;
    };
    if (rec(0, 0)) return grp;
  }
  throw NoValidGrouping("no assignment satisfies the grouping rules");
}

void TermCorrection::validate() const {
  for (double v : g.values())
    if (!(v > 0.0)) throw BadConfig("term correction g must stay positive");
  for (double v : h.values())
    if (!(v > 0.0)) throw BadConfig("term correction h must stay positive");
}

Eigen::VectorXd kv_volatility(const LscModel& m, const TermCorrection& corr, double t,
                              const Window& w) {
  if (corr.smoothed)
    return kv_volatility(m, t, w, [&](double T) { return corr.g_smooth(T); });
  return kv_volatility(m, t, w, &corr.g);
}

double vs_integral(const LscModel& m, const Window& w, const PiecewiseConstant& g,
                   const PiecewiseConstant& h, double t0, double t1) {
  if (t1 > w.ts + kTimeTol) throw BadConfig("VS integral endpoint beyond delivery start");
  if (!(t1 > t0)) return 0.0;
  const auto prof = window_profiles(m, w, &g);
  return weighted_quad_integral(m, prof, prof, h, t0, t1);
}

double vs_integral(const LscModel& m, const Window& w, const std::function<double(double)>& g,
                   const std::function<double(double)>& h, double t0, double t1) {
  if (t1 > w.ts + kTimeTol) throw BadConfig("VS integral endpoint beyond delivery start");
  if (!(t1 > t0)) return 0.0;
  const auto f = [&](double t) {
    const Eigen::VectorXd sig = kv_volatility(m, t, w, g);
    const double hv = h(t);
    return hv * hv * sig.dot(m.R * sig);
  };
  // The inner volatility quadrature carries ~1e-13 absolute noise per
  // evaluation, so the outer tolerance must stay well above that floor.
  const double scale = std::abs(f(0.5 * (t0 + t1))) * (t1 - t0);
  return adaptive_integrate(f, t0, t1, std::max(1e-9 * scale, 1e-12));
}

double vs_price(const LscModel& m, const TermCorrection& corr, const Window& w, double T) {
  if (corr.smoothed)
    return vs_integral(
        m, w, [&](double x) { return corr.g_smooth(x); },
        [&](double t) { return corr.h_smooth(t); }, 0.0, T);
  return vs_integral(m, w, corr.g, corr.h, 0.0, T);
}

PiecewiseConstant strip_h(const PiecewiseConstant& g, const SmileGrouping& grp,
                          const std::vector<SmileSpec>& smiles, const LscModel& m) {
  if (grp.h_group.empty()) return PiecewiseConstant();
  struct HS {
    double T;
    int idx;
  };
  std::vector<HS> hs;
  for (int idx : grp.h_group) hs.push_back({smiles[static_cast<size_t>(idx)].maturity, idx});
  std::sort(hs.begin(), hs.end(), [](const HS& a, const HS& b) { return a.T < b.T; });
  for (size_t k = 1; k < hs.size(); ++k)
    if (close(hs[k - 1].T, hs[k].T))
      throw NoValidGrouping("two observation-weight smiles share a maturity");

  // Profiles per h contract under the current g.
  std::map<int, std::vector<ExpSum>> prof;
  for (const HS& e : hs) {
    const SmileSpec& s = smiles[static_cast<size_t>(e.idx)];
    if (prof.find(s.contract) == prof.end())
      prof.emplace(s.contract, window_profiles(m, s.window, &g));
  }

  const size_t K = hs.size();
  std::vector<double> breaks(K), values(K + 1, 1.0);
  for (size_t k = 0; k < K; ++k) breaks[k] = hs[k].T;
  for (size_t k = 0; k < K; ++k) {
    const SmileSpec& s = smiles[static_cast<size_t>(hs[k].idx)];
    const auto& p = prof.at(s.contract);
    double already = 0.0;
    for (size_t j = 0; j < k; ++j) {
      const double a = (j == 0) ? 0.0 : hs[j - 1].T;
      already += values[j] * values[j] * quad_form_integral(m, p, p, a, hs[j].T);
    }
    const double a = (k == 0) ? 0.0 : hs[k - 1].T;
    const double denom = quad_form_integral(m, p, p, a, hs[k].T);
    if (!(denom > 0.0))
      throw DegenerateWeights("zero model variance on a maturity interval for " + s.label);
    const double numer = s.vs - already;
    if (!(numer > 0.0))
      throw NegativeIncrement("VS target implies a non-positive variance increment at maturity " +
                              std::to_string(hs[k].T) + " for " + s.label);
    values[k] = std::sqrt(numer / denom);
  }
  return PiecewiseConstant(breaks, values);
}

PiecewiseConstant solve_g(const PiecewiseConstant& h, const SmileGrouping& grp,
                          const std::vector<SmileSpec>& smiles, const LscModel& m,
                          const PiecewiseConstant* prev, std::vector<std::string>* warnings) {
  const auto entries = g_entries(grp, smiles);
  if (entries.empty()) return PiecewiseConstant();
  const auto breaks = g_breakpoints(entries);
  const auto owner = piece_owners(breaks, entries);
  const size_t P = owner.size();
  std::vector<double> piece_val(P, 1.0);

  for (size_t c = 0; c < entries.size(); ++c) {
    const GEntry& e = entries[c];
    const double D = e.window.duration();
    // Split the window into pieces somebody else owns (values already set
    // this pass) and the contract's own pieces carrying the unknown value.
    std::vector<ExpSum> known(static_cast<size_t>(m.n_factors()));
    std::vector<ExpSum> own(static_cast<size_t>(m.n_factors()));
    bool has_known = false, has_own = false;
    for (size_t p = 0; p < P; ++p) {
      if (breaks[p] < e.window.ts - kTimeTol || breaks[p + 1] > e.window.te + kTimeTol) continue;
      const Window piece{breaks[p], breaks[p + 1]};
      const double wgt = piece.duration() / D;
      for (int f = 0; f < m.n_factors(); ++f) {
        ExpSum pf = factor_profile(m, f, piece);
        for (ExpTerm& t : pf) t.coef *= wgt;
        auto& dst = (owner[p] == static_cast<int>(c)) ? own : known;
        if (owner[p] != static_cast<int>(c))
          for (ExpTerm& t : pf) t.coef *= piece_val[p];
        dst[static_cast<size_t>(f)].insert(dst[static_cast<size_t>(f)].end(), pf.begin(),
                                           pf.end());
      }
      (owner[p] == static_cast<int>(c) ? has_own : has_known) = true;
    }
    if (!has_own)
      throw NoValidGrouping("contract " + smiles[static_cast<size_t>(e.smile)].label +
                            " has no delivery piece of its own");

    const double q_oo = weighted_quad_integral(m, own, own, h, 0.0, e.maturity);
    if (!(q_oo > 0.0))
      throw DegenerateWeights("zero model variance for " +
                              smiles[static_cast<size_t>(e.smile)].label);
    double value;
    if (!has_known) {
      value = std::sqrt(e.vs / q_oo);
    } else {
      const double q_kk = weighted_quad_integral(m, known, known, h, 0.0, e.maturity);
      const double q_ko = weighted_quad_integral(m, known, own, h, 0.0, e.maturity);
      const double disc = q_ko * q_ko - q_oo * (q_kk - e.vs);
      if (disc < 0.0)
        throw NoPositiveRoot("no real delivery-weight solution for " +
                             smiles[static_cast<size_t>(e.smile)].label);
      const double r1 = (-q_ko + std::sqrt(disc)) / q_oo;
      const double r2 = (-q_ko - std::sqrt(disc)) / q_oo;
      if (r1 <= 0.0 && r2 <= 0.0)
        throw NoPositiveRoot("no positive delivery-weight solution for " +
                             smiles[static_cast<size_t>(e.smile)].label);
      if (r1 > 0.0 && r2 > 0.0) {
        double ref = 1.0;
        if (prev)
          for (size_t p = 0; p < P; ++p)
            if (owner[p] == static_cast<int>(c)) {
              ref = (*prev)(0.5 * (breaks[p] + breaks[p + 1]));
              break;
            }
        value = (std::abs(r1 - ref) <= std::abs(r2 - ref)) ? r1 : r2;
        if (warnings)
          warnings->push_back("two positive roots for " +
                              smiles[static_cast<size_t>(e.smile)].label +
                              "; kept the one closer to the previous iterate");
      } else {
        value = r1 > 0.0 ? r1 : r2;
      }
    }
    for (size_t p = 0; p < P; ++p)
      if (owner[p] == static_cast<int>(c)) piece_val[p] = value;
  }

  std::vector<double> values(P + 2, 1.0);
  for (size_t p = 0; p < P; ++p) values[p + 1] = piece_val[p];
  return PiecewiseConstant(breaks, values);
}

}  // namespace hjmcal
