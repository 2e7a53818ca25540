#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace alm {

struct TenorGrid {
  int count = 2;       // N, number of accrual periods
  double delta = 1.0;  // year fraction per period

  TenorGrid() = default;
  TenorGrid(int count, double delta = 1.0);

  double date(int j) const { return j * delta; }
};

// Zero-bond prices P(0,t) on the tenor dates t = 0..N.
class InitialCurve {
 public:
  InitialCurve() = default;
  InitialCurve(std::vector<double> discount, double delta = 1.0);

  // Annually compounded flat rate.
  static InitialCurve flat(double rate, int count, double delta = 1.0);
  // Linear interpolation in annually compounded zero rates, flat extrapolation.
  static InitialCurve from_zero_rates(std::span<const double> maturities,
                                      std::span<const double> rates, int count,
                                      double delta = 1.0);
  static InitialCurve from_zero_prices(std::span<const double> maturities,
                                       std::span<const double> prices, int count,
                                       double delta = 1.0);

  int size() const { return static_cast<int>(discount_.size()) - 1; }
  double delta() const { return delta_; }
  double discount(int t) const { return discount_.at(static_cast<std::size_t>(t)); }
  double forward(int i) const;  // F^0_i on [t_i, t_{i+1}]
  const std::vector<double>& discounts() const { return discount_; }

 private:
  std::vector<double> discount_;
  double delta_ = 1.0;
};

inline constexpr double kTamingOff = std::numeric_limits<double>::infinity();

struct MfVolParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  std::vector<double> angles;  // theta_m for labels m = 1..N, stored at m-1
  double v0 = kTamingOff;      // variance threshold; infinity disables the mean-field switch
  double stretch = 1.0;        // f

  bool taming() const { return v0 < kTamingOff; }
  // Throws DomainError on invalid parameters or a failed pointwise-bound scan.
  void validate(const TenorGrid& grid) const;

  static std::vector<double> linear_angles(int count, double first, double step);
};

// Factor loading with at most two nonzero driver coordinates (0-based).
struct Loading {
  std::array<int, 2> index{0, 1};
  std::array<double, 2> value{0.0, 0.0};
  int size = 0;

  double norm2() const;
  double dot(const Loading& other) const;
  std::vector<double> dense(int dimension) const;
};

// Labels m are 1-based: forward m accrues over [t_{m-1}, t_m].
std::array<double, 2> rebonato_vector(double t, int m, const TenorGrid& grid,
                                      const MfVolParams& params);
double taming_factor(double psi, const MfVolParams& params);
Loading mf_loading(int m, double t, double psi, const TenorGrid& grid, const MfVolParams& params);
std::vector<double> mf_lambda(int m, double t, double psi, const TenorGrid& grid,
                              const MfVolParams& params);
// |d lambda / d psi| away from the regime switch.
double mf_lambda_derivative(int m, double t, double psi, const TenorGrid& grid,
                            const MfVolParams& params);
// Analytic constant K with psi |d lambda/d psi|^2 <= K for every label and time.
double taming_bound_constant(const TenorGrid& grid, const MfVolParams& params);

double psi_estimate(std::span<const double> forwards, std::span<const double> numeraires,
                    std::span<const double> bonds, double p0m);

// forwards and loadings are indexed by absolute 0-based forward index k.
double spot_drift(int m, int j, std::span<const double> forwards, std::span<const Loading> loadings,
                  double delta);

double zero_bond(int j, int m, std::span<const double> forwards, double delta);

struct GbmParams {
  double sigma = 0.0;
  double yield = 0.0;  // dividend or rental yield d
};

double gbm_step(double mv, double forward, const GbmParams& params, double z);

struct EsgConfig {
  TenorGrid grid;
  InitialCurve curve;
  MfVolParams vol;
  std::size_t scenarios = 5000;
  std::uint64_t seed = 1;
  double forward_cap = 10.0;
  bool antithetic = false;
};

// Particle ensemble at one tenor step; forwards are n x N row-major by absolute index.
struct EnsembleState {
  int step = 0;
  std::size_t particles = 0;
  int tenors = 0;
  std::vector<double> forwards;
  std::vector<double> numeraire;
  std::vector<char> blown_up;
  std::vector<double> max_forward;

  double* row(std::size_t p) { return forwards.data() + p * static_cast<std::size_t>(tenors); }
  const double* row(std::size_t p) const {
    return forwards.data() + p * static_cast<std::size_t>(tenors);
  }
};

struct PsiState {
  int step = 0;
  std::vector<double> psi;  // by absolute forward index; entries <= step unused
};

EnsembleState initial_state(const InitialCurve& curve, std::size_t particles);
PsiState compute_psi(const EnsembleState& state, const InitialCurve& curve);
void euler_step(EnsembleState& state, const PsiState& psi, const TenorGrid& grid,
                const MfVolParams& params, std::uint64_t seed, double forward_cap,
                bool antithetic = false);

class ScenarioSet {
 public:
  ScenarioSet() = default;
  ScenarioSet(TenorGrid grid, std::size_t scenarios, std::uint64_t seed);

  std::size_t size() const { return scenarios_; }
  const TenorGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }

  // F_j^i for j <= i < N.
  double forward(std::size_t p, int j, int i) const {
    return forwards_[p * tri_ + offset(j) + static_cast<std::size_t>(i - j)];
  }
  std::span<const double> curve_row(std::size_t p, int j) const {
    return {forwards_.data() + p * tri_ + offset(j), static_cast<std::size_t>(grid_.count - j)};
  }
  double numeraire(std::size_t p, int j) const {
    return numeraire_[p * static_cast<std::size_t>(grid_.count + 1) + static_cast<std::size_t>(j)];
  }
  double zero_bond(std::size_t p, int j, int m) const;
  bool blown_up(std::size_t p) const { return blown_[p] != 0; }
  double max_forward(std::size_t p) const { return max_forward_[p]; }
  std::size_t blown_up_count() const;

  // Equity and property shocks, independent of the rate drivers.
  double market_normal(std::size_t p, int t, int stream) const;

  void store(const EnsembleState& state);
  void store_numeraire(const EnsembleState& state);
  void finish(const EnsembleState& state);

 private:
  std::size_t offset(int j) const {
    const auto jj = static_cast<std::size_t>(j);
    const auto n = static_cast<std::size_t>(grid_.count);
    return jj * n - jj * (jj - 1) / 2;
  }

  TenorGrid grid_;
  std::size_t scenarios_ = 0;
  std::uint64_t seed_ = 0;
  std::size_t tri_ = 0;
  std::vector<double> forwards_;
  std::vector<double> numeraire_;
  std::vector<char> blown_;
  std::vector<double> max_forward_;
};

ScenarioSet generate_scenarios(const EsgConfig& config);

double blow_up_fraction(const ScenarioSet& scenarios, double threshold);

struct MartingaleStat {
  double mean = 0.0;
  double se = 0.0;
  double target = 0.0;
};

// Ensemble mean of B(t_j)^{-1} P(j,m) against P(0,m).
MartingaleStat deflated_bond(const ScenarioSet& scenarios, const InitialCurve& curve, int j, int m);

}  // namespace alm
