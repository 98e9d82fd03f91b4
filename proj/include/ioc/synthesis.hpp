#pragma once

#include "ioc/continuous.hpp"
#include "ioc/discrete.hpp"
#include "ioc/system.hpp"

namespace ioc {

// Regime-dispatching view of the synthesized state weighting: the Bellman-equation
// form for discrete-time models, the HJB form for continuous-time ones.
class SynthesizedQ {
 public:
  explicit SynthesizedQ(const SystemModel& sys) : sys_(&sys) {}

  double operator()(const StateVector& x) const {
    return sys_->regime() == TimeRegime::kDiscrete
               ? discrete::synthesize_q(*sys_, x)
               : continuous::synthesize_q(*sys_, x);
  }

  const SystemModel& system() const { return *sys_; }

 private:
  const SystemModel* sys_;
};

// Analytic law for either regime.
inline ControlVector optimal_control(const SystemModel& sys,
                                     const StateVector& x) {
  return sys.regime() == TimeRegime::kDiscrete
             ? discrete::optimal_control(sys, x)
             : continuous::optimal_control(sys, x);
}

}  // namespace ioc
