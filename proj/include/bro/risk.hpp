#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bro {

/// Which risk functional is applied to the posterior-induced performance
/// H(x; theta): plain expectation, mean-variance with weight a >= 0, or a
/// tail measure (VaR / CVaR) at level alpha in (0,1).
struct RiskSpec {
  enum class Kind { expectation, mean_variance, var, cvar };

  Kind kind = Kind::expectation;
  double alpha = 0.0;   // VaR/CVaR level
  double weight = 0.0;  // mean-variance weight

  static RiskSpec expectation() { return RiskSpec{Kind::expectation, 0.0, 0.0}; }

  static RiskSpec mean_variance(double a) {
    RiskSpec s{Kind::mean_variance, 0.0, a};
    s.validate();
    return s;
  }

  static RiskSpec value_at_risk(double alpha) {
    RiskSpec s{Kind::var, alpha, 0.0};
    s.validate();
    return s;
  }

  static RiskSpec cvar(double alpha) {
    RiskSpec s{Kind::cvar, alpha, 0.0};
    s.validate();
    return s;
  }

  bool is_tail_measure() const { return kind == Kind::var || kind == Kind::cvar; }

  void validate() const {
    if (is_tail_measure() && !(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("risk level alpha must lie in (0,1)");
    }
    if (kind == Kind::mean_variance && !(weight >= 0.0 && std::isfinite(weight))) {
      throw std::invalid_argument("mean-variance weight must be finite and >= 0");
    }
  }

  std::string name() const {
    switch (kind) {
      case Kind::expectation: return "expectation";
      case Kind::mean_variance: return "mean_variance";
      case Kind::var: return "var";
      case Kind::cvar: return "cvar";
    }
    return "?";
  }
};

}  // namespace bro
