#include "hjmcal/ssvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hjmcal/black.hpp"
#include "hjmcal/csv.hpp"
#include "hjmcal/errors.hpp"
#include "hjmcal/neldermead.hpp"

namespace hjmcal {

void SmileQuote::validate() const {
  if (!(F0 > 0.0)) throw BadConfig("smile '" + contract_id + "': F0 must be positive");
  if (!(T > 0.0)) throw BadConfig("smile '" + contract_id + "': maturity must be positive");
  if (quotes.size() < 1) throw EmptyInput("smile '" + contract_id + "': no quotes");
  for (size_t q = 0; q < quotes.size(); ++q) {
    if (!(quotes[q].K > 0.0)) throw BadConfig("smile '" + contract_id + "': strike <= 0");
    if (!(quotes[q].value > 0.0)) throw BadConfig("smile '" + contract_id + "': quote <= 0");
    if (q > 0 && !(quotes[q].K > quotes[q - 1].K))
      throw BadConfig("smile '" + contract_id + "': strikes not strictly increasing");
  }
}

std::vector<double> SmileQuote::ivs() const {
  std::vector<double> out;
  out.reserve(quotes.size());
  for (const auto& q : quotes) {
    if (q.is_iv) {
      out.push_back(q.value);
    } else {
      // Put premiums are mapped through parity so one inversion path is used.
      const double call = q.is_call ? q.value : q.value + F0 - q.K;
      out.push_back(implied_vol(call, F0, q.K, T));
    }
  }
  return out;
}

double SmileQuote::iv_at(double K) const {
  const auto vols = ivs();
  if (K <= quotes.front().K) return vols.front();
  if (K >= quotes.back().K) return vols.back();
  size_t hi = 1;
  while (quotes[hi].K < K) ++hi;
  const double k0 = quotes[hi - 1].K, k1 = quotes[hi].K;
  const double u = (K - k0) / (k1 - k0);
  return (1.0 - u) * vols[hi - 1] + u * vols[hi];
}

double ThetaCurve::at(double t) const {
  if (T.empty()) throw EmptyInput("empty ATM variance curve");
  if (!(t > 0.0)) throw BadConfig("ATM variance requested at non-positive maturity");
  const size_t n = T.size();
  if (t <= T[0]) return theta[0] * t / T[0];
  for (size_t i = 1; i < n; ++i) {
    if (t <= T[i]) {
      const double u = (t - T[i - 1]) / (T[i] - T[i - 1]);
      return (1.0 - u) * theta[i - 1] + u * theta[i];
    }
  }
  const double slope =
      n >= 2 ? (theta[n - 1] - theta[n - 2]) / (T[n - 1] - T[n - 2]) : theta[0] / T[0];
  return theta[n - 1] + slope * (t - T[n - 1]);
}

int MultiSsviParams::contract_index(const std::string& id) const {
  for (size_t i = 0; i < contract_ids.size(); ++i)
    if (contract_ids[i] == id) return static_cast<int>(i);
  throw BadConfig("unknown contract '" + id + "'");
}

void MultiSsviParams::validate() const {
  if (!(eta > 0.0)) throw BadConfig("eta must be positive");
  if (!(gamma > 0.0 && gamma <= 0.5)) throw BadConfig("gamma must lie in (0, 0.5]");
  double max_rho = 0.0;
  for (double r : rho) {
    if (!(std::abs(r) <= 1.0)) throw BadConfig("|rho| must be <= 1");
    max_rho = std::max(max_rho, std::abs(r));
  }
  if (eta * (1.0 + max_rho) > 2.0 + 1e-12)
    throw BadConfig("wing bound eta (1 + max|rho|) <= 2 violated");
  if (rho.size() != contract_ids.size() || theta.size() != contract_ids.size())
    throw BadConfig("per-contract field sizes disagree");
  for (const auto& c : theta) {
    if (c.T.size() != c.theta.size() || c.T.empty()) throw BadConfig("bad ATM variance curve");
    for (size_t i = 0; i < c.T.size(); ++i) {
      if (!(c.theta[i] > 0.0)) throw BadConfig("ATM total variance must be positive");
      if (i > 0 && (!(c.T[i] > c.T[i - 1]) || c.theta[i] < c.theta[i - 1] - 1e-14))
        throw BadConfig("ATM total variance must be nondecreasing in maturity");
    }
  }
}

double ssvi_phi(double theta, double eta, double gamma) {
  return eta / (std::pow(theta, gamma) * std::pow(1.0 + theta, 1.0 - gamma));
}

namespace {

double ssvi_w(double theta, double rho, double phi, double k) {
  const double pk = phi * k;
  return 0.5 * theta * (1.0 + rho * pk + std::sqrt((pk + rho) * (pk + rho) + 1.0 - rho * rho));
}

}  // namespace

double ssvi_total_variance(const MultiSsviParams& p, int contract, double T, double k) {
  const double theta = p.theta[static_cast<size_t>(contract)].at(T);
  const double phi = ssvi_phi(theta, p.eta, p.gamma);
  return ssvi_w(theta, p.rho[static_cast<size_t>(contract)], phi, k);
}

double ssvi_iv(const MultiSsviParams& p, int contract, double T, double F0, double K) {
  const double w = ssvi_total_variance(p, contract, T, std::log(K / F0));
  return std::sqrt(w / T);
}

namespace {

struct FitLayout {
  std::vector<std::string> contract_ids;
  std::vector<std::vector<size_t>> smiles_of;  // per contract: input smile indices
  std::vector<ThetaCurve> theta;               // anchored, monotone-repaired
};

FitLayout anchor_thetas(const std::vector<SmileQuote>& smiles) {
  FitLayout lay;
  std::map<std::string, size_t> index;
  for (size_t j = 0; j < smiles.size(); ++j) {
    const auto& s = smiles[j];
    auto it = index.find(s.contract_id);
    if (it == index.end()) {
      it = index.emplace(s.contract_id, lay.contract_ids.size()).first;
      lay.contract_ids.push_back(s.contract_id);
      lay.smiles_of.emplace_back();
    }
    lay.smiles_of[it->second].push_back(j);
  }
  lay.theta.resize(lay.contract_ids.size());
  for (size_t i = 0; i < lay.contract_ids.size(); ++i) {
    auto& idx = lay.smiles_of[i];
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return smiles[a].T < smiles[b].T; });
    double prev = 0.0;
    for (size_t j : idx) {
      const double atm = smiles[j].iv_at(smiles[j].F0);
      // Running max keeps the ATM curve nondecreasing if quotes carry
      // slight calendar inconsistencies.
      const double th = std::max(atm * atm * smiles[j].T, prev + 1e-14);
      lay.theta[i].T.push_back(smiles[j].T);
      lay.theta[i].theta.push_back(th);
      prev = th;
    }
  }
  return lay;
}

double smile_objective(const SmileQuote& s, const std::vector<double>& mkt_iv, double theta,
                       double rho, double eta, double gamma) {
  const double phi = ssvi_phi(theta, eta, gamma);
  double sum = 0.0;
  for (size_t q = 0; q < s.quotes.size(); ++q) {
    const double K = s.quotes[q].K;
    const double w = ssvi_w(theta, rho, phi, std::log(K / s.F0));
    const double sig = std::sqrt(w / s.T);
    const double vega = std::max(black_vega(s.F0, K, s.T, mkt_iv[q]), 1e-8 * s.F0);
    const bool call = s.quotes[q].is_call;
    const double model = call ? black_call(s.F0, K, s.T, sig) : black_put(s.F0, K, s.T, sig);
    const double mark =
        call ? black_call(s.F0, K, s.T, mkt_iv[q]) : black_put(s.F0, K, s.T, mkt_iv[q]);
    const double r = (model - mark) / vega;
    sum += r * r;
  }
  return sum;
}

struct InnerFit {
  std::vector<double> rho;
  double loss = 0.0;
};

// Per-contract rho given global (eta, gamma); rho capped so the wing bound holds.
InnerFit fit_rhos(const std::vector<SmileQuote>& smiles,
                  const std::vector<std::vector<double>>& mkt_ivs, const FitLayout& lay,
                  double eta, double gamma, double rho_cap) {
  InnerFit fit;
  fit.rho.resize(lay.contract_ids.size());
  for (size_t i = 0; i < lay.contract_ids.size(); ++i) {
    auto loss_i = [&](double rho) {
      double sum = 0.0;
      for (size_t j : lay.smiles_of[i])
        sum += smile_objective(smiles[j], mkt_ivs[j], lay.theta[i].at(smiles[j].T), rho, eta,
                               gamma);
      return sum;
    };
    NelderMeadOptions opt;
    opt.max_iter = 300;
    opt.tol_diameter = 1e-12;
    opt.initial_step = 0.4;
    double best_loss = std::numeric_limits<double>::infinity();
    double best_rho = 0.0;
    for (double start : {-0.6, 0.0, 0.6}) {
      Eigen::VectorXd x0(1);
      x0 << std::atanh(std::clamp(start, -0.99, 0.99));
      const auto res = nelder_mead(
          [&](const Eigen::VectorXd& x) { return loss_i(rho_cap * std::tanh(x(0))); }, x0, opt);
      if (res.f < best_loss) {
        best_loss = res.f;
        best_rho = rho_cap * std::tanh(res.x(0));
      }
    }
    fit.rho[i] = best_rho;
    fit.loss += best_loss;
  }
  return fit;
}

struct GlobalFit {
  double eta = 0.0, gamma = 0.0, loss = 0.0;
  std::vector<double> rho;
};

GlobalFit fit_global(const std::vector<SmileQuote>& smiles,
                     const std::vector<std::vector<double>>& mkt_ivs, const FitLayout& lay,
                     bool constrained) {
  const auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const auto logit = [](double p) { return std::log(p / (1.0 - p)); };

  auto eval = [&](const Eigen::VectorXd& x, GlobalFit* out) {
    const double eta = constrained ? 2.0 * sigmoid(x(0)) : std::exp(x(0));
    const double gamma = 0.05 + 0.45 * sigmoid(x(1));
    const double cap = constrained ? std::min(1.0 - 1e-9, 2.0 / eta - 1.0) : 1.0 - 1e-9;
    const auto inner = fit_rhos(smiles, mkt_ivs, lay, eta, gamma, std::max(cap, 0.0));
    if (out) {
      out->eta = eta;
      out->gamma = gamma;
      out->rho = inner.rho;
      out->loss = inner.loss;
    }
    return inner.loss;
  };

  NelderMeadOptions opt;
  opt.max_iter = 250;
  opt.tol_diameter = 1e-10;
  opt.initial_step = 0.6;

  GlobalFit best;
  best.loss = std::numeric_limits<double>::infinity();
  for (double eta0 : {0.5, 1.0, 1.6}) {
    for (double gam0 : {0.15, 0.3, 0.45}) {
      Eigen::VectorXd x0(2);
      x0(0) = constrained ? logit(eta0 / 2.0) : std::log(eta0);
      x0(1) = logit((gam0 - 0.05) / 0.45);
      const auto res = nelder_mead([&](const Eigen::VectorXd& x) { return eval(x, nullptr); },
                                   x0, opt);
      GlobalFit cand;
      eval(res.x, &cand);
      if (cand.loss < best.loss) best = cand;
    }
  }
  return best;
}

}  // namespace

MultiSsviParams fit_multi_ssvi(const std::vector<SmileQuote>& smiles) {
  if (smiles.empty()) throw EmptyInput("no smiles to fit");
  std::vector<std::vector<double>> mkt_ivs;
  mkt_ivs.reserve(smiles.size());
  for (const auto& s : smiles) {
    s.validate();
    if (s.quotes.size() < 3)
      throw BadConfig("smile '" + s.contract_id + "': need at least 3 strikes");
    mkt_ivs.push_back(s.ivs());
  }
  const FitLayout lay = anchor_thetas(smiles);

  const GlobalFit fit = fit_global(smiles, mkt_ivs, lay, /*constrained=*/true);
  double max_rho = 0.0;
  for (double r : fit.rho) max_rho = std::max(max_rho, std::abs(r));
  if (fit.eta * (1.0 + max_rho) > 2.0 - 1e-6) {
    const GlobalFit free = fit_global(smiles, mkt_ivs, lay, /*constrained=*/false);
    double free_max_rho = 0.0;
    for (double r : free.rho) free_max_rho = std::max(free_max_rho, std::abs(r));
    if (free.eta * (1.0 + free_max_rho) > 2.0 + 1e-6)
      throw InfeasibleConstraint(
          "wing bound eta (1 + max|rho|) <= 2 is active and the unconstrained optimum "
          "violates it (eta=" +
          std::to_string(free.eta) + ", max|rho|=" + std::to_string(free_max_rho) + ")");
  }

  MultiSsviParams p;
  p.contract_ids = lay.contract_ids;
  p.rho = fit.rho;
  p.eta = fit.eta;
  p.gamma = fit.gamma;
  p.theta = lay.theta;
  p.residuals.resize(smiles.size());
  for (size_t i = 0; i < lay.contract_ids.size(); ++i) {
    for (size_t j : lay.smiles_of[i]) {
      const double sum = smile_objective(smiles[j], mkt_ivs[j], lay.theta[i].at(smiles[j].T),
                                         fit.rho[i], fit.eta, fit.gamma);
      p.residuals[j] = std::sqrt(sum / static_cast<double>(smiles[j].quotes.size()));
    }
  }
  p.validate();
  return p;
}

std::vector<SmileQuote> load_smiles_csv(const std::string& path, Date t0) {
  const CsvTable table = read_csv(path);
  const int c_id = table.col("contract_id");
  const int c_mat = table.col("maturity_date");
  const int c_f0 = table.col("F0");
  const int c_k = table.col("strike");
  const int c_v = table.col("value");
  const int c_kind = table.col("kind");

  std::map<std::pair<std::string, std::string>, SmileQuote> grouped;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& row : table.rows) {
    const std::pair<std::string, std::string> key{row[static_cast<size_t>(c_id)],
                                                  row[static_cast<size_t>(c_mat)]};
    auto it = grouped.find(key);
    if (it == grouped.end()) {
      SmileQuote s;
      s.contract_id = key.first;
      s.T = year_frac_act365(t0, Date::parse(key.second));
      s.F0 = std::stod(row[static_cast<size_t>(c_f0)]);
      it = grouped.emplace(key, std::move(s)).first;
      order.push_back(key);
    }
    OptionQuote q;
    q.K = std::stod(row[static_cast<size_t>(c_k)]);
    q.value = std::stod(row[static_cast<size_t>(c_v)]);
    const std::string& kind = row[static_cast<size_t>(c_kind)];
    if (kind == "iv_call") {
      q.is_iv = true;
      q.is_call = true;
    } else if (kind == "iv_put") {
      q.is_iv = true;
      q.is_call = false;
    } else if (kind == "call") {
      q.is_iv = false;
      q.is_call = true;
    } else if (kind == "put") {
      q.is_iv = false;
      q.is_call = false;
    } else {
      throw BadConfig("unknown quote kind '" + kind + "' in " + path);
    }
    grouped.at(key).quotes.push_back(q);
  }
  if (grouped.empty()) throw EmptyInput("no smile rows in " + path);

  std::vector<SmileQuote> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    SmileQuote s = grouped.at(key);
    std::sort(s.quotes.begin(), s.quotes.end(),
              [](const OptionQuote& a, const OptionQuote& b) { return a.K < b.K; });
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hjmcal
