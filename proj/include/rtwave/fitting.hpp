#pragma once

#include <string>
#include <vector>

namespace rtwave {

enum class DecayModel { exponential, algebraic };

const char* decay_model_name(DecayModel m);
DecayModel parse_decay_model(const std::string& name);

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  /// Decay rate (exponential, value ~ exp(-rate t)) or exponent (algebraic, value ~ (1+t)^-rate).
  double rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;
};

/// Least-squares fit of log(value) against t (exponential) or log(1+t)
/// (algebraic) after dropping the leading transient fraction of the samples.
/// Throws DataError with fewer than 20 samples, nonpositive values in the
/// window, or a transient fraction outside [0, 1).
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value, DecayModel model,
                   double transient_fraction = 0.2);

/// True when value[i+1] <= value[i] * (1 + rel_tol) for every sample at or
/// after the transient fraction.
bool nonincreasing_after(const std::vector<double>& value, double transient_fraction = 0.2, double rel_tol = 0.0);

/// Least-squares slope p of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rtwave
