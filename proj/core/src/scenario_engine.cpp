#include "alm/scenario_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alm/errors.hpp"
#include "alm/numeric.hpp"
#include "alm/rng.hpp"

namespace alm {

TenorGrid::TenorGrid(int count_, double delta_) : count(count_), delta(delta_) {
  if (!(delta > 0.0)) throw DomainError("tenor grid: delta must be positive");
  if (count < 2) throw DomainError("tenor grid: N must be at least 2");
  if (count % 2 != 0) throw DomainError("tenor grid: N must be even");
}

InitialCurve::InitialCurve(std::vector<double> discount, double delta)
    : discount_(std::move(discount)), delta_(delta) {
  if (discount_.size() < 2) throw DomainError("initial curve: need at least P(0,0) and P(0,1)");
  if (std::abs(discount_[0] - 1.0) > 1e-12) throw DomainError("initial curve: P(0,0) must be 1");
  for (double p : discount_) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("initial curve: prices must be positive");
  }
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(forward(i))) throw DomainError("initial curve: non-finite forward");
  }
}

InitialCurve InitialCurve::flat(double rate, int count, double delta) {
  std::vector<double> p(static_cast<std::size_t>(count) + 1);
  for (int t = 0; t <= count; ++t) p[static_cast<std::size_t>(t)] = std::pow(1.0 + rate, -t * delta);
  return InitialCurve(std::move(p), delta);
}

namespace {

double interpolate(std::span<const double> x, std::span<const double> y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto k = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + w * (y[k] - y[k - 1]);
}

void check_nodes(std::span<const double> maturities, std::span<const double> values) {
  if (maturities.empty() || maturities.size() != values.size())
    throw DataError("curve input: maturities and values must be non-empty and equally long");
  for (std::size_t k = 1; k < maturities.size(); ++k) {
    if (!(maturities[k] > maturities[k - 1]))
      throw DataError("curve input: maturities must be strictly increasing");
  }
}

}  // namespace

InitialCurve InitialCurve::from_zero_rates(std::span<const double> maturities,
                                           std::span<const double> rates, int count,
                                           double delta) {
  check_nodes(maturities, rates);
  std::vector<double> p(static_cast<std::size_t>(count) + 1);
  p[0] = 1.0;
  for (int t = 1; t <= count; ++t) {
    const double tau = t * delta;
    p[static_cast<std::size_t>(t)] = std::pow(1.0 + interpolate(maturities, rates, tau), -tau);
  }
  return InitialCurve(std::move(p), delta);
}

InitialCurve InitialCurve::from_zero_prices(std::span<const double> maturities,
                                            std::span<const double> prices, int count,
                                            double delta) {
  check_nodes(maturities, prices);
  std::vector<double> rates(prices.size());
  for (std::size_t k = 0; k < prices.size(); ++k) {
    if (!(prices[k] > 0.0)) throw DataError("curve input: zero prices must be positive");
    if (!(maturities[k] > 0.0)) throw DataError("curve input: maturities must be positive");
    rates[k] = std::pow(prices[k], -1.0 / maturities[k]) - 1.0;
  }
  return from_zero_rates(maturities, rates, count, delta);
}

double InitialCurve::forward(int i) const {
  return (discount(i) / discount(i + 1) - 1.0) / delta_;
}

std::vector<double> MfVolParams::linear_angles(int count, double first, double step) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) out[static_cast<std::size_t>(m)] = first + step * m;
  return out;
}

double Loading::norm2() const {
  double s = 0.0;
  for (int q = 0; q < size; ++q) s += value[static_cast<std::size_t>(q)] * value[static_cast<std::size_t>(q)];
  return s;
}

double Loading::dot(const Loading& other) const {
  double s = 0.0;
  for (int q = 0; q < size; ++q) {
    for (int r = 0; r < other.size; ++r) {
      if (index[static_cast<std::size_t>(q)] == other.index[static_cast<std::size_t>(r)])
        s += value[static_cast<std::size_t>(q)] * other.value[static_cast<std::size_t>(r)];
    }
  }
  return s;
}

std::vector<double> Loading::dense(int dimension) const {
  std::vector<double> out(static_cast<std::size_t>(dimension), 0.0);
  for (int q = 0; q < size; ++q) {
    out.at(static_cast<std::size_t>(index[static_cast<std::size_t>(q)])) += value[static_cast<std::size_t>(q)];
  }
  return out;
}

std::array<double, 2> rebonato_vector(double t, int m, const TenorGrid& grid,
                                      const MfVolParams& params) {
  if (m < 1 || m > grid.count) throw DomainError("rebonato_vector: label out of range");
  const double to_reset = grid.date(m - 1) - t;
  if (to_reset < -1e-12) throw DomainError("rebonato_vector: t beyond the reset date");
  const double tr = std::max(to_reset, 0.0);
  const double s = (params.a * tr + params.d) * std::exp(-params.b * tr) + params.c;
  const double theta = params.angles.at(static_cast<std::size_t>(m - 1));
  return {s * std::cos(theta), s * std::sin(theta)};
}

double taming_factor(double psi, const MfVolParams& params) {
  if (!params.taming()) return 1.0;
  return std::exp(-std::max(psi / (params.stretch * params.v0) - 1.0, 0.0));
}

Loading mf_loading(int m, double t, double psi, const TenorGrid& grid, const MfVolParams& params) {
  if (psi < 0.0) throw DomainError("mf_lambda: negative variance");
  const auto r = rebonato_vector(t, m, grid, params);
  Loading out;
  if (!params.taming() || psi <= params.v0) {
    out.index = {0, 1};
    out.value = {r[0], r[1]};
    out.size = 2;
    return out;
  }
  const int n = (m + 1) / 2;
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  out.index = {n - 1, n - 1};
  out.value = {sign * taming_factor(psi, params) * std::hypot(r[0], r[1]), 0.0};
  out.size = 1;
  return out;
}

std::vector<double> mf_lambda(int m, double t, double psi, const TenorGrid& grid,
                              const MfVolParams& params) {
  return mf_loading(m, t, psi, grid, params).dense(grid.count);
}

double mf_lambda_derivative(int m, double t, double psi, const TenorGrid& grid,
                            const MfVolParams& params) {
  if (!params.taming() || psi <= params.stretch * params.v0) return 0.0;
  const auto r = rebonato_vector(t, m, grid, params);
  return std::hypot(r[0], r[1]) * taming_factor(psi, params) / (params.stretch * params.v0);
}

namespace {

double max_rebonato_norm2(const TenorGrid& grid, const MfVolParams& params) {
  double best = 0.0;
  for (int tau = 0; tau <= grid.count; ++tau) {
    const double tr = tau * grid.delta;
    const double s = (params.a * tr + params.d) * std::exp(-params.b * tr) + params.c;
    best = std::max(best, s * s);
  }
  return best;
}

}  // namespace

double taming_bound_constant(const TenorGrid& grid, const MfVolParams& params) {
  if (!params.taming()) return 0.0;
  return max_rebonato_norm2(grid, params) / (params.stretch * params.v0);
}

void MfVolParams::validate(const TenorGrid& grid) const {
  for (double x : {a, b, c, d}) {
    if (!std::isfinite(x)) throw DomainError("vol params: Rebonato coefficients must be finite");
  }
  if (angles.size() < static_cast<std::size_t>(grid.count))
    throw DomainError("vol params: need one angle per tenor label");
  if (!(v0 > 0.0)) throw DomainError("vol params: v0 must be positive");
  if (!(stretch >= 1.0)) throw DomainError("vol params: stretch f must be at least 1");
  if (!taming()) return;

  const double k = taming_bound_constant(grid, *this);
  const int points = 2001;
  const double top = 100.0 * stretch * v0;
  for (int m = 1; m <= grid.count; ++m) {
    for (int j = 0; j <= m - 1; ++j) {
      const double t = grid.date(j);
      for (int q = 0; q < points; ++q) {
        const double v = top * q / (points - 1);
        const double g = mf_lambda_derivative(m, t, v, grid, *this);
        if (v * g * g > k * (1.0 + 1e-9) + 1e-300)
          throw DomainError("vol params: taming map violates the pointwise bound at m=" +
                            std::to_string(m));
      }
    }
  }
}

double psi_estimate(std::span<const double> forwards, std::span<const double> numeraires,
                    std::span<const double> bonds, double p0m) {
  const std::size_t n = forwards.size();
  if (n == 0) throw DomainError("psi_estimate: empty ensemble");
  if (numeraires.size() != n || bonds.size() != n)
    throw DomainError("psi_estimate: inputs differ in length");
  std::vector<double> w(n);
  double mu = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    w[p] = bonds[p] / (numeraires[p] * p0m);
    if (!std::isfinite(w[p])) throw DataError("psi_estimate: non-finite weight");
    if (w[p] < 0.0) throw DataError("psi_estimate: negative weight");
    mu += w[p] * forwards[p];
  }
  mu /= static_cast<double>(n);
  double psi = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double e = forwards[p] - mu;
    psi += w[p] * e * e;
  }
  return psi / static_cast<double>(n);
}

double spot_drift(int m, int j, std::span<const double> forwards, std::span<const Loading> loadings,
                  double delta) {
  if (!(j < m) || m >= static_cast<int>(forwards.size()) ||
      m >= static_cast<int>(loadings.size()))
    throw DomainError("spot_drift: need j < m <= N-1");
  double s = 0.0;
  const Loading& lm = loadings[static_cast<std::size_t>(m)];
  for (int k = j + 1; k <= m; ++k) {
    const double df = delta * forwards[static_cast<std::size_t>(k)];
    if (df + 1.0 == 0.0) throw DomainError("spot_drift: singular factor 1 + delta F = 0");
    s += df / (df + 1.0) * loadings[static_cast<std::size_t>(k)].dot(lm);
  }
  return s;
}

double zero_bond(int j, int m, std::span<const double> forwards, double delta) {
  if (j > m || m > static_cast<int>(forwards.size()))
    throw DomainError("zero_bond: need j <= m <= N");
  double p = 1.0;
  for (int l = j; l < m; ++l) {
    const double factor = 1.0 + delta * forwards[static_cast<std::size_t>(l)];
    if (!(factor > 0.0)) throw DomainError("zero_bond: non-positive factor 1 + delta F");
    p /= factor;
  }
  return p;
}

double gbm_step(double mv, double forward, const GbmParams& params, double z) {
  return mv * std::exp(forward - params.yield - 0.5 * params.sigma * params.sigma + params.sigma * z);
}

EnsembleState initial_state(const InitialCurve& curve, std::size_t particles) {
  EnsembleState s;
  s.step = 0;
  s.particles = particles;
  s.tenors = curve.size();
  s.forwards.resize(particles * static_cast<std::size_t>(s.tenors));
  double top = 0.0;
  for (int i = 0; i < s.tenors; ++i) {
    const double f = curve.forward(i);
    if (!(f > 0.0)) throw DomainError("initial curve: log-forward scheme needs positive forwards");
    top = std::max(top, f);
  }
  for (std::size_t p = 0; p < particles; ++p) {
    for (int i = 0; i < s.tenors; ++i) s.row(p)[i] = curve.forward(i);
  }
  s.numeraire.assign(particles, 1.0);
  s.blown_up.assign(particles, 0);
  s.max_forward.assign(particles, top);
  return s;
}

PsiState compute_psi(const EnsembleState& state, const InitialCurve& curve) {
  const int j = state.step;
  const int n_tenor = state.tenors;
  const std::size_t n = state.particles;
  const double delta = curve.delta();
  PsiState out;
  out.step = j;
  out.psi.assign(static_cast<std::size_t>(n_tenor), 0.0);
  if (j + 1 >= n_tenor || n == 0) return out;

  // w_p(i) = B_p^{-1} P_p(j, i+1) / P(0, i+1), stored n x N.
  std::vector<double> w(n * static_cast<std::size_t>(n_tenor), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pp = 0; pp < static_cast<std::ptrdiff_t>(n); ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    const double* f = state.row(p);
    double bond = 1.0;
    for (int i = j; i < n_tenor; ++i) {
      bond /= 1.0 + delta * f[i];
      w[p * static_cast<std::size_t>(n_tenor) + static_cast<std::size_t>(i)] =
          bond / (state.numeraire[p] * curve.discount(i + 1));
    }
  }

#pragma omp parallel for schedule(static)
  for (int i = j + 1; i < n_tenor; ++i) {
    double mu = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      mu += w[p * static_cast<std::size_t>(n_tenor) + static_cast<std::size_t>(i)] * state.row(p)[i];
    mu /= static_cast<double>(n);
    double psi = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double e = state.row(p)[i] - mu;
      psi += w[p * static_cast<std::size_t>(n_tenor) + static_cast<std::size_t>(i)] * e * e;
    }
    out.psi[static_cast<std::size_t>(i)] = psi / static_cast<double>(n);
  }
  return out;
}

void euler_step(EnsembleState& state, const PsiState& psi, const TenorGrid& grid,
                const MfVolParams& params, std::uint64_t seed, double forward_cap, bool antithetic) {
  const int j = state.step;
  const int n_tenor = state.tenors;
  const double delta = grid.delta;
  const double t = grid.date(j);
  const double sqrt_dt = std::sqrt(delta);

  std::vector<Loading> load(static_cast<std::size_t>(n_tenor));
  int dimension = 0;
  for (int i = j + 1; i < n_tenor; ++i) {
    const double v = psi.psi.at(static_cast<std::size_t>(i));
    load[static_cast<std::size_t>(i)] = mf_loading(i + 1, t, v, grid, params);
    const Loading& l = load[static_cast<std::size_t>(i)];
    for (int q = 0; q < l.size; ++q) dimension = std::max(dimension, l.index[static_cast<std::size_t>(q)] + 1);
  }

#pragma omp parallel
  {
    std::vector<double> z(static_cast<std::size_t>(dimension));
    std::vector<double> acc(static_cast<std::size_t>(dimension));
#pragma omp for schedule(static)
    for (std::ptrdiff_t pp = 0; pp < static_cast<std::ptrdiff_t>(state.particles); ++pp) {
      const auto p = static_cast<std::size_t>(pp);
      const std::size_t key = antithetic ? p - p % 2 : p;
      const double sign = (antithetic && p % 2 == 1) ? -1.0 : 1.0;
      for (int k = 0; k < dimension; ++k) {
        z[static_cast<std::size_t>(k)] = sign * keyed_normal(seed, key, static_cast<std::uint64_t>(j),
                                                             static_cast<std::uint64_t>(k));
      }
      std::fill(acc.begin(), acc.end(), 0.0);
      double* f = state.row(p);
      const double reset = f[j];
      for (int i = j + 1; i < n_tenor; ++i) {
        const Loading& l = load[static_cast<std::size_t>(i)];
        const double df = delta * f[i];
        const double c = df / (1.0 + df);
        double drift = 0.0;
        double dw = 0.0;
        for (int q = 0; q < l.size; ++q) {
          const auto idx = static_cast<std::size_t>(l.index[static_cast<std::size_t>(q)]);
          acc[idx] += c * l.value[static_cast<std::size_t>(q)];
        }
        for (int q = 0; q < l.size; ++q) {
          const auto idx = static_cast<std::size_t>(l.index[static_cast<std::size_t>(q)]);
          drift += acc[idx] * l.value[static_cast<std::size_t>(q)];
          dw += l.value[static_cast<std::size_t>(q)] * z[idx] * sqrt_dt;
        }
        double next = f[i] * std::exp((drift - 0.5 * l.norm2()) * delta + dw);
        if (!(next <= forward_cap)) {
          next = forward_cap;
          state.blown_up[p] = 1;
        }
        f[i] = next;
        state.max_forward[p] = std::max(state.max_forward[p], next);
      }
      state.numeraire[p] *= 1.0 + delta * reset;
    }
  }
  state.step = j + 1;
}

ScenarioSet::ScenarioSet(TenorGrid grid, std::size_t scenarios, std::uint64_t seed)
    : grid_(grid), scenarios_(scenarios), seed_(seed) {
  const auto n = static_cast<std::size_t>(grid_.count);
  tri_ = n * (n + 1) / 2;
  forwards_.assign(scenarios_ * tri_, 0.0);
  numeraire_.assign(scenarios_ * (n + 1), 1.0);
  blown_.assign(scenarios_, 0);
  max_forward_.assign(scenarios_, 0.0);
}

double ScenarioSet::zero_bond(std::size_t p, int j, int m) const {
  if (j > m || m > grid_.count) throw DomainError("zero_bond: need j <= m <= N");
  double price = 1.0;
  for (int l = j; l < m; ++l) price /= 1.0 + grid_.delta * forward(p, j, l);
  return price;
}

std::size_t ScenarioSet::blown_up_count() const {
  return static_cast<std::size_t>(std::count(blown_.begin(), blown_.end(), 1));
}

double ScenarioSet::market_normal(std::size_t p, int t, int stream) const {
  return keyed_normal(seed_ ^ 0x6d61726b65747321ULL, p, static_cast<std::uint64_t>(t),
                      static_cast<std::uint64_t>(stream));
}

void ScenarioSet::store(const EnsembleState& state) {
  const int j = state.step;
  for (std::size_t p = 0; p < scenarios_; ++p) {
    const double* f = state.row(p);
    double* dst = forwards_.data() + p * tri_ + offset(j);
    for (int i = j; i < grid_.count; ++i) dst[i - j] = f[i];
    blown_[p] = state.blown_up[p];
    max_forward_[p] = state.max_forward[p];
  }
  store_numeraire(state);
}

void ScenarioSet::store_numeraire(const EnsembleState& state) {
  const auto stride = static_cast<std::size_t>(grid_.count + 1);
  for (std::size_t p = 0; p < scenarios_; ++p)
    numeraire_[p * stride + static_cast<std::size_t>(state.step)] = state.numeraire[p];
}

void ScenarioSet::finish(const EnsembleState& state) {
  store_numeraire(state);
  for (std::size_t p = 0; p < scenarios_; ++p) {
    blown_[p] = state.blown_up[p];
    max_forward_[p] = state.max_forward[p];
  }
}

ScenarioSet generate_scenarios(const EsgConfig& config) {
  if (config.curve.size() != config.grid.count)
    throw DomainError("generate_scenarios: curve must cover exactly N tenor periods");
  if (config.scenarios == 0) throw DomainError("generate_scenarios: need at least one scenario");
  config.vol.validate(config.grid);
  ScenarioSet set(config.grid, config.scenarios, config.seed);
  EnsembleState state = initial_state(config.curve, config.scenarios);
  for (int j = 0; j < config.grid.count; ++j) {
    set.store(state);
    const PsiState psi = compute_psi(state, config.curve);
    euler_step(state, psi, config.grid, config.vol, config.seed, config.forward_cap,
               config.antithetic);
  }
  set.finish(state);
  return set;
}

double blow_up_fraction(const ScenarioSet& scenarios, double threshold) {
  if (scenarios.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < scenarios.size(); ++p) {
    if (scenarios.max_forward(p) > threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scenarios.size());
}

MartingaleStat deflated_bond(const ScenarioSet& scenarios, const InitialCurve& curve, int j, int m) {
  std::vector<double> x(scenarios.size());
  for (std::size_t p = 0; p < scenarios.size(); ++p)
    x[p] = scenarios.zero_bond(p, j, m) / scenarios.numeraire(p, j);
  const SampleStats s = sample_stats(x);
  return {s.mean, s.se, curve.discount(m)};
}

}  // namespace alm
