#include "rtwave/fitting.hpp"

#include <algorithm>
#include <cmath>

#include "rtwave/common.hpp"

namespace rtwave {

namespace {

struct Line {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DataError("fit: abscissae are all equal");
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - l.intercept - l.slope * x[i];
    ssr += e * e;
  }
  l.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return l;
}

}  // namespace

const char* decay_model_name(DecayModel m) { return m == DecayModel::exponential ? "exponential" : "algebraic"; }

DecayModel parse_decay_model(const std::string& name) {
  if (name == "exponential") return DecayModel::exponential;
  if (name == "algebraic") return DecayModel::algebraic;
  throw ConfigError("model: expected exponential or algebraic, got '" + name + "'");
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value, DecayModel model,
                   double transient_fraction) {
  if (t.size() != value.size()) throw DataError("fit_decay: time and value lengths differ");
  if (t.size() < 20) throw DataError("fit_decay: at least 20 samples are required");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
    throw DataError("fit_decay: transient fraction must lie in [0, 1)");
  const std::size_t first = static_cast<std::size_t>(std::floor(transient_fraction * t.size()));
  std::vector<double> x, y;
  for (std::size_t i = first; i < t.size(); ++i) {
    if (!(value[i] > 0.0)) throw DataError("fit_decay: nonpositive value at t = " + std::to_string(t[i]));
    if (model == DecayModel::algebraic && !(t[i] > -1.0)) throw DataError("fit_decay: algebraic model needs t > -1");
    x.push_back(model == DecayModel::exponential ? t[i] : std::log1p(t[i]));
    y.push_back(std::log(value[i]));
  }
  if (x.size() < 2) throw DataError("fit_decay: window holds fewer than two samples");
  const Line l = least_squares(x, y);
  DecayFit f;
  f.model = model;
  f.rate = -l.slope;
  f.intercept = l.intercept;
  f.r_squared = l.r_squared;
  f.window_start = t[first];
  f.window_end = t.back();
  f.samples = static_cast<int>(x.size());
  return f;
}

bool nonincreasing_after(const std::vector<double>& value, double transient_fraction, double rel_tol) {
  const std::size_t first = static_cast<std::size_t>(std::floor(transient_fraction * value.size()));
  for (std::size_t i = first; i + 1 < value.size(); ++i)
    if (value[i + 1] > value[i] * (1.0 + rel_tol)) return false;
  return true;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("log_log_slope: need two or more paired samples");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DataError("log_log_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly).slope;
}

}  // namespace rtwave
