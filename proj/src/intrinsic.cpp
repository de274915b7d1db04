#include "infoflow/intrinsic.hpp"

#include <cmath>
#include <stdexcept>

namespace infoflow::intrinsic {

double curiosity_raw(const env::State& s, const env::Action& a,
                     const env::State& s_next, const env::Action& a_next,
                     const wm::ForwardModel& f,
                     const wm::ExtendedForwardModel& k,
                     const CuriosityConfig& cfg) {
  if (cfg.alpha < 0.0) {
    throw std::invalid_argument("curiosity_raw: alpha must be >= 0");
  }
  const double forward_error = (s_next.vec() - f.predict(s, a)).norm();
  const double extended_error = (s_next.vec() - k.predict(s, a, a_next)).norm();
  return forward_error - cfg.alpha * extended_error;
}

void RewardStats::push(double raw) {
  count_ += 1;
  const double delta = raw - run_mean_;
  run_mean_ += delta / static_cast<double>(count_);
  run_m2_ += delta * (raw - run_mean_);
}

void RewardStats::commit() {
  if (count_ == 0) return;
  mean_ = run_mean_;
  std_ = std::sqrt(run_m2_ / static_cast<double>(count_));
}

double normalize(double raw, const RewardStats& stats) {
  const double std = stats.stddev() < 1e-8 ? 1.0 : stats.stddev();
  return (raw - stats.mean()) / std;
}

namespace {

// Uniform action batch; draws ax then ay per sample so callers get the same
// sequence for any fixed seed.
Mat sample_actions(const EmpowermentConfig& cfg, std::mt19937_64& rng) {
  if (cfg.n_action_samples < 2) {
    throw std::invalid_argument("empowerment: need at least 2 action samples");
  }
  std::uniform_real_distribution<double> dist(cfg.action_low, cfg.action_high);
  Mat actions(cfg.n_action_samples, 2);
  for (Eigen::Index i = 0; i < actions.rows(); ++i) {
    actions(i, 0) = dist(rng);
    actions(i, 1) = dist(rng);
  }
  return actions;
}

}  // namespace

double h1_spread(const env::State& s, const wm::TransitionPredictor& f,
                 const EmpowermentConfig& cfg, std::mt19937_64& rng) {
  const Mat actions = sample_actions(cfg, rng);
  const Mat states = s.vec().transpose().replicate(actions.rows(), 1);
  const Mat predictions = f.predict_batch(states, actions);
  const Eigen::RowVector2d centroid = predictions.colwise().mean();
  return (predictions.rowwise() - centroid).rowwise().norm().mean();
}

double empowerment_reward(const env::State& s, const env::State& s_next,
                          const env::Action& policy_action,
                          const wm::TransitionPredictor& f,
                          const EmpowermentConfig& cfg, std::mt19937_64& rng) {
  const double h1 = h1_spread(s, f, cfg, rng);
  const double h2 = (s_next.vec() - f.predict(s, policy_action)).norm();
  return h1 - h2;
}

}  // namespace infoflow::intrinsic
