#pragma once

#include <random>

#include "infoflow/env.hpp"
#include "infoflow/types.hpp"
#include "infoflow/worldmodel.hpp"

namespace infoflow::intrinsic {

struct CuriosityConfig {
  double alpha = 0.0;  // weight of the homeostatic term, >= 0
};

// ||s' - f(s,a)||_2 - alpha * ||s' - k(s,a,a')||_2
double curiosity_raw(const env::State& s, const env::Action& a,
                     const env::State& s_next, const env::Action& a_next,
                     const wm::ForwardModel& f,
                     const wm::ExtendedForwardModel& k,
                     const CuriosityConfig& cfg);

// Running moments over every raw curiosity value since run start. push()
// accumulates per sample; commit() publishes the mean/std snapshot used for
// normalization at each episode end. Before the first commit the snapshot is
// (0, 1). std is the population standard deviation.
class RewardStats {
 public:
  void push(double raw);
  void commit();

  double mean() const { return mean_; }
  double stddev() const { return std_; }
  long count() const { return count_; }

 private:
  long count_ = 0;
  double run_mean_ = 0.0;
  double run_m2_ = 0.0;
  double mean_ = 0.0;
  double std_ = 1.0;
};

// (raw - mean) / std, with std below 1e-8 replaced by 1.
double normalize(double raw, const RewardStats& stats);

struct EmpowermentConfig {
  int n_action_samples = 32;  // N of the first entropy-term estimator
  double action_low = -10.0;
  double action_high = 10.0;
};

// Mean L2 deviation of f(s, a_i) from its sample mean over n_action_samples
// uniform actions: the estimator of H(S_{t+1} | s_t).
double h1_spread(const env::State& s, const wm::TransitionPredictor& f,
                 const EmpowermentConfig& cfg, std::mt19937_64& rng);

// H1 - H2 with H2 = ||s_next - f(s, policy_action)||_2.
double empowerment_reward(const env::State& s, const env::State& s_next,
                          const env::Action& policy_action,
                          const wm::TransitionPredictor& f,
                          const EmpowermentConfig& cfg, std::mt19937_64& rng);

}  // namespace infoflow::intrinsic
