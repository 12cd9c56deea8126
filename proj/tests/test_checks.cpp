#include <gtest/gtest.h>

#include <cmath>

#include "rtwave/common.hpp"
#include "rtwave/fitting.hpp"
#include "rtwave/functional_checks.hpp"

using namespace rtwave;

namespace {

GridPtr grid(int nv, int nh = 8, double L1 = 1.0, double L2 = 1.0) {
  GridSpec s;
  s.n_h = nh;
  s.n_v_plus = nv;
  s.n_v_minus = nv;
  s.L1 = L1;
  s.L2 = L2;
  return Grid::make(s);
}

std::vector<double> times(int n, double T) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = T * i / (n - 1);
  return t;
}

}  // namespace

TEST(FitDecay, ExponentialExact) {
  const auto t = times(50, 5.0);
  std::vector<double> v;
  for (double s : t) v.push_back(3.0 * std::exp(-2.0 * s));
  const DecayFit f = fit_decay(t, v, DecayModel::exponential);
  EXPECT_NEAR(f.rate, 2.0, 1e-6);
  EXPECT_GT(f.r_squared, 0.9999);
  EXPECT_EQ(f.samples, 40);
  EXPECT_NEAR(f.window_start, t[10], 0.0);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-9);
}

TEST(FitDecay, AlgebraicExact) {
  const auto t = times(40, 20.0);
  std::vector<double> v;
  for (double s : t) v.push_back(std::pow(1.0 + s, -3.0));
  const DecayFit f = fit_decay(t, v, DecayModel::algebraic);
  EXPECT_NEAR(f.rate, 3.0, 1e-6);
  EXPECT_GT(f.r_squared, 0.9999);
}

TEST(FitDecay, WrongModelFitsWorse) {
  const auto t = times(60, 30.0);
  std::vector<double> v;
  for (double s : t) v.push_back(std::pow(1.0 + s, -2.0));
  EXPECT_LT(fit_decay(t, v, DecayModel::exponential, 0.0).r_squared,
            fit_decay(t, v, DecayModel::algebraic, 0.0).r_squared);
}

TEST(FitDecay, DataErrors) {
  const auto t = times(30, 1.0);
  std::vector<double> v(30, 1.0);
  v[25] = 0.0;
  EXPECT_THROW(fit_decay(t, v, DecayModel::exponential), DataError);
  EXPECT_THROW(fit_decay(times(19, 1.0), std::vector<double>(19, 1.0), DecayModel::exponential), DataError);
  EXPECT_THROW(fit_decay(t, std::vector<double>(30, 1.0), DecayModel::exponential, 1.0), DataError);
  EXPECT_THROW(parse_decay_model("power"), ConfigError);
  EXPECT_EQ(parse_decay_model(decay_model_name(DecayModel::algebraic)), DecayModel::algebraic);
}

TEST(FitDecay, ConstantSeriesHasZeroRateAndFullFit) {
  const DecayFit f = fit_decay(times(25, 1.0), std::vector<double>(25, 2.0), DecayModel::exponential);
  EXPECT_EQ(f.rate, 0.0);
  EXPECT_EQ(f.r_squared, 1.0);
}

TEST(Monotone, TransientIgnored) {
  std::vector<double> v{1.0, 2.0, 3.0, 2.0, 1.5, 1.0, 0.5, 0.4, 0.3, 0.2};
  EXPECT_TRUE(nonincreasing_after(v, 0.3));
  EXPECT_FALSE(nonincreasing_after(v, 0.0));
}

TEST(LogLogSlope, PowerLaw) {
  EXPECT_NEAR(log_log_slope({0.1, 0.05, 0.025}, {0.2, 0.05, 0.0125}), 2.0, 1e-12);
  EXPECT_THROW(log_log_slope({1.0}, {1.0}), DataError);
}

TEST(Korn, ConstrainedMinimumPositiveAndResolutionStable) {
  const KornReport a = korn_constant_estimate(grid(12));
  const KornReport b = korn_constant_estimate(grid(20));
  EXPECT_GT(a.minimum, 1e-3);
  EXPECT_LT(a.minimum, 2.0);
  EXPECT_NEAR(b.minimum / a.minimum, 1.0, 0.1);
}

TEST(Korn, FreeBottomAdmitsTranslations) {
  const KornReport r = korn_constant_estimate(grid(12), false);
  EXPECT_LT(r.minimum, 1e-10);
  EXPECT_EQ(r.n1, 0);
  EXPECT_EQ(r.n2, 0);
}

TEST(DeviatoricKernel, PolynomialFieldsAnnihilated) {
  const KernelReport r = deviatoric_kernel_check(grid(8), 20, 3);
  EXPECT_EQ(r.samples, 20);
  EXPECT_LT(r.max_residual, 1e-10);
}

TEST(DeviatoricKernel, BottomConstraintForcesZero) {
  const KernelReport r = deviatoric_kernel_check(grid(8, 8, 1.5, 0.5), 1, 4);
  EXPECT_EQ(r.rank, 10);
  EXPECT_TRUE(r.unique_zero_solution());
}

TEST(PoissonBounds, RatiosBoundedOverRandomFields) {
  const PoissonBoundReport r = poisson_bound_ratios(grid(40, 16), 100, 9);
  EXPECT_EQ(r.trials, 100);
  EXPECT_TRUE(r.pass()) << r.worst[0] << " " << r.worst[1] << " " << r.worst[2];
  EXPECT_GT(r.worst[1], 0.5);
}
