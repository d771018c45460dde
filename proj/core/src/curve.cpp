#include "hjmcal/curve.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "hjmcal/csv.hpp"
#include "hjmcal/errors.hpp"

namespace hjmcal {

AbsoluteQuote AbsoluteQuote::uniform(std::string id, Date Ts, Date Te, double price) {
  AbsoluteQuote q;
  q.id = std::move(id);
  q.Ts = Ts;
  q.Te = Te;
  q.price = price;
  const int n = Te - Ts;
  if (n > 0) q.daily_weights.assign(static_cast<size_t>(n), 1.0 / n);
  q.validate();
  return q;
}

void AbsoluteQuote::validate() const {
  if (Te - Ts <= 0) throw BadConfig("quote '" + id + "': empty delivery window");
  if (daily_weights.size() != static_cast<size_t>(Te - Ts))
    throw BadConfig("quote '" + id + "': weights do not span the delivery window");
  double sum = 0.0;
  for (double w : daily_weights) {
    if (!(w >= 0.0)) throw BadConfig("quote '" + id + "': negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw BadConfig("quote '" + id + "': weights sum to " + std::to_string(sum));
}

double DailyForwardCurve::value_at(Date d) const {
  const int l = d - t0;
  if (l < 0 || l >= static_cast<int>(values.size()))
    throw OutOfGrid("date " + d.to_string() + " outside curve grid");
  return values[static_cast<size_t>(l)];
}

double DailyForwardCurve::average(Date a, Date b) const {
  if (b - a <= 0) throw OutOfGrid("empty averaging window");
  double sum = 0.0;
  for (Date d = a; d < b; d = d + 1) sum += value_at(d);
  return sum / (b - a);
}

DailyForwardCurve strip_curve(const std::vector<AbsoluteQuote>& quotes, Date t0, Date Tbar) {
  if (quotes.empty()) throw EmptyInput("no quotes to strip");
  const int n = Tbar - t0;
  if (n <= 0) throw BadConfig("curve horizon ends before the observation date");
  for (const auto& q : quotes) {
    q.validate();
    if (q.Ts < t0) throw BadConfig("quote '" + q.id + "': delivery starts before t0");
    if (q.Te > Tbar) throw BadConfig("quote '" + q.id + "': delivery ends after the horizon");
  }
  const int m = static_cast<int>(quotes.size());

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  for (int j = 0; j < m; ++j) {
    const auto& q = quotes[static_cast<size_t>(j)];
    const int off = q.Ts - t0;
    for (int l = 0; l < q.Te - q.Ts; ++l)
      A(j, off + l) = q.daily_weights[static_cast<size_t>(l)];
    b(j) = q.price;
  }

  // Drop linearly dependent constraint rows; their consistency is checked after the solve.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
  const int r = static_cast<int>(qr.rank());
  std::vector<int> keep(qr.colsPermutation().indices().data(),
                        qr.colsPermutation().indices().data() + r);
  std::sort(keep.begin(), keep.end());

  // KKT system for min sum (s_l - s_{l-1})^2 subject to the kept averages:
  //   [2 D^T D  A_r^T] [s ]   [0  ]
  //   [A_r      0    ] [nu] = [b_r]
  // 2 D^T D is tridiagonal, so the bordered system is solved sparsely.
  using T = Eigen::Triplet<double>;
  std::vector<T> trip;
  trip.reserve(static_cast<size_t>(3 * n + 2 * r * 40));
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    if (i > 0) {
      diag += 2.0;
      trip.emplace_back(i, i - 1, -2.0);
    }
    if (i < n - 1) {
      diag += 2.0;
      trip.emplace_back(i, i + 1, -2.0);
    }
    trip.emplace_back(i, i, diag);
  }
  for (int jj = 0; jj < r; ++jj) {
    const int j = keep[static_cast<size_t>(jj)];
    for (int l = 0; l < n; ++l) {
      if (A(j, l) != 0.0) {
        trip.emplace_back(n + jj, l, A(j, l));
        trip.emplace_back(l, n + jj, A(j, l));
      }
    }
  }
  Eigen::SparseMatrix<double> K(n + r, n + r);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw InfeasibleQuotes("singular stripping system");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + r);
  for (int jj = 0; jj < r; ++jj) rhs(n + jj) = b(keep[static_cast<size_t>(jj)]);
  const Eigen::VectorXd sol = lu.solve(rhs);

  DailyForwardCurve curve;
  curve.t0 = t0;
  curve.values.assign(sol.data(), sol.data() + n);

  const Eigen::VectorXd resid = A * sol.head(n) - b;
  for (int j = 0; j < m; ++j) {
    if (std::abs(resid(j)) > 1e-8 * std::max(1.0, std::abs(b(j))))
      throw InfeasibleQuotes("quote '" + quotes[static_cast<size_t>(j)].id +
                             "' inconsistent with the others (residual " +
                             std::to_string(resid(j)) + ")");
  }
  return curve;
}

double rolling_quote(const DailyForwardCurve& curve, const RollingSpecDays& spec) {
  if (spec.te <= spec.ts) throw BadConfig("rolling window is empty");
  return curve.average(curve.t0 + spec.ts, curve.t0 + spec.te);
}

std::vector<double> log_return_series(const std::vector<DailyForwardCurve>& curves,
                                      const RollingSpecDays& spec, int tau_d) {
  if (tau_d < 1) throw BadConfig("return lag must be at least one observation");
  if (static_cast<int>(curves.size()) <= tau_d)
    throw EmptyInput("not enough curves for the requested lag");
  for (size_t h = 1; h < curves.size(); ++h)
    if (!(curves[h - 1].t0 < curves[h].t0))
      throw BadConfig("curve observation dates must be strictly increasing");

  std::vector<double> out;
  out.reserve(curves.size() - static_cast<size_t>(tau_d));
  for (size_t h = static_cast<size_t>(tau_d); h < curves.size(); ++h) {
    const Date a = curves[h].t0 + spec.ts;
    const Date b = curves[h].t0 + spec.te;
    const double now = curves[h].average(a, b);
    const double then = curves[h - static_cast<size_t>(tau_d)].average(a, b);
    if (!(now > 0.0) || !(then > 0.0))
      throw NonPositivePrice("rolling quote not positive at observation " + std::to_string(h));
    out.push_back(std::log(now / then));
  }
  return out;
}

std::vector<double> clip_outliers(const std::vector<double>& series, double k) {
  if (series.empty()) throw EmptyInput("empty return series");
  if (!(k > 0.0)) throw BadConfig("clip width must be positive");
  std::vector<double> v = series;
  if (v.size() < 2) return v;
  // Winsorize against the current mean/std and repeat until stable, so the
  // operation is a projection (applying it twice changes nothing).
  for (int pass = 0; pass < 100; ++pass) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double lo = mean - k * sd;
    const double hi = mean + k * sd;
    bool changed = false;
    for (double& x : v) {
      if (x < lo) {
        x = lo;
        changed = true;
      } else if (x > hi) {
        x = hi;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return v;
}

Eigen::MatrixXd ewma_covariance(const Eigen::MatrixXd& returns, double span, double tau_d,
                                double business_days_per_year) {
  const int H = static_cast<int>(returns.rows());
  const int P = static_cast<int>(returns.cols());
  if (H < 2 || P < 1) throw EmptyInput("need at least two return observations");
  if (!(span >= 1.0)) throw BadConfig("decay span must be >= 1");
  if (!(tau_d >= 1.0)) throw BadConfig("return lag must be >= 1 day");

  const double alpha = 2.0 / (span + 1.0);
  Eigen::VectorXd w(H);
  for (int h = 0; h < H; ++h) w(h) = std::pow(1.0 - alpha, H - 1 - h);
  w /= w.sum();
  const double w2 = w.squaredNorm();
  if (w2 >= 1.0 - 1e-12)
    throw DegenerateWeights("effective sample size too small for span " + std::to_string(span));

  const Eigen::RowVectorXd mean = w.transpose() * returns;
  const Eigen::MatrixXd centered = returns.rowwise() - mean;
  const Eigen::MatrixXd S =
      centered.transpose() * w.asDiagonal() * centered / (1.0 - w2);
  return S * (business_days_per_year / tau_d);
}

CovarianceEstimate averaged_covariance(const Eigen::MatrixXd& returns,
                                       const std::vector<double>& spans, double tau_d,
                                       double business_days_per_year) {
  if (spans.empty()) throw EmptyInput("no decay spans");
  const int P = static_cast<int>(returns.cols());
  const int Z = static_cast<int>(spans.size());

  std::vector<Eigen::MatrixXd> covs;
  covs.reserve(spans.size());
  for (double span : spans)
    covs.push_back(ewma_covariance(returns, span, tau_d, business_days_per_year));

  CovarianceEstimate est;
  est.C_mkt = Eigen::MatrixXd::Zero(P, P);
  for (const auto& c : covs) est.C_mkt += c;
  est.C_mkt /= Z;

  est.U = Eigen::MatrixXd::Zero(P, P);
  for (const auto& c : covs) est.U += (c - est.C_mkt).cwiseAbs2();
  est.U = (est.U / Z).cwiseSqrt();

  const double ubar = est.U.mean();
  if (ubar <= 0.0) {
    est.Gamma = Eigen::MatrixXd::Ones(P, P);
  } else {
    est.Gamma = (est.U.array() + ubar).inverse().matrix();
    est.Gamma /= est.Gamma.mean();
  }
  return est;
}

Eigen::VectorXd pca_explained_variance(const Eigen::MatrixXd& returns) {
  const int H = static_cast<int>(returns.rows());
  const int P = static_cast<int>(returns.cols());
  if (H < 2 || P < 1) throw EmptyInput("need at least two return observations");
  const Eigen::RowVectorXd mean = returns.colwise().mean();
  const Eigen::MatrixXd centered = returns.rowwise() - mean;
  const Eigen::MatrixXd S = centered.transpose() * centered / (H - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).reverse();
  const double total = lam.sum();
  if (!(total > 0.0)) throw BadConfig("return series has no variance");
  Eigen::VectorXd out(P);
  double acc = 0.0;
  for (int i = 0; i < P; ++i) {
    acc += lam(i);
    out(i) = acc / total;
  }
  out(P - 1) = 1.0;
  return out;
}

std::map<Date, std::vector<AbsoluteQuote>> load_quotes_csv(const std::string& path,
                                                           const std::string& profile_path) {
  const CsvTable table = read_csv(path);
  const int c_date = table.col("date");
  const int c_id = table.col("contract_id");
  const int c_ts = table.col("Ts");
  const int c_te = table.col("Te");
  const int c_price = table.col("price");

  std::map<std::string, std::vector<std::pair<int, double>>> profiles;
  if (!profile_path.empty()) {
    const CsvTable prof = read_csv(profile_path);
    const int p_id = prof.col("contract_id");
    const int p_day = prof.col("day_index");
    const int p_w = prof.col("weight");
    for (const auto& row : prof.rows)
      profiles[row[static_cast<size_t>(p_id)]].emplace_back(
          std::stoi(row[static_cast<size_t>(p_day)]), std::stod(row[static_cast<size_t>(p_w)]));
  }

  std::map<Date, std::vector<AbsoluteQuote>> out;
  for (const auto& row : table.rows) {
    AbsoluteQuote q = AbsoluteQuote::uniform(
        row[static_cast<size_t>(c_id)], Date::parse(row[static_cast<size_t>(c_ts)]),
        Date::parse(row[static_cast<size_t>(c_te)]), std::stod(row[static_cast<size_t>(c_price)]));
    const auto it = profiles.find(q.id);
    if (it != profiles.end()) {
      std::fill(q.daily_weights.begin(), q.daily_weights.end(), 0.0);
      double sum = 0.0;
      for (const auto& [day, weight] : it->second) {
        if (day < 0 || day >= q.Te - q.Ts)
          throw BadConfig("profile day " + std::to_string(day) + " outside window of '" + q.id +
                          "'");
        q.daily_weights[static_cast<size_t>(day)] = weight;
        sum += weight;
      }
      if (!(sum > 0.0)) throw BadConfig("profile weights for '" + q.id + "' sum to zero");
      for (double& w : q.daily_weights) w /= sum;
      q.validate();
    }
    out[Date::parse(row[static_cast<size_t>(c_date)])].push_back(std::move(q));
  }
  if (out.empty()) throw EmptyInput("no quote rows in " + path);
  return out;
}

}  // namespace hjmcal
