#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "infoflow/env.hpp"
#include "infoflow/nn.hpp"
#include "infoflow/types.hpp"

namespace infoflow::ddpg {

struct Transition {
  env::State s;
  env::Action a;
  env::State s_next;
  // Policy action at s_next recorded at collection time; consumed by the
  // curiosity reward and, behind a flag, by extended-model training.
  env::Action a_next;
  double raw_reward = 0.0;
  bool terminal = false;
};

// FIFO ring; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void store(const Transition& t);
  size_t size() const { return full_ ? ring_.size() : next_; }
  size_t capacity() const { return ring_.size(); }
  // Logical order: index 0 is the oldest retained transition.
  const Transition& at(size_t i) const;
  // nullopt when the buffer is empty (caller skips the training step).
  std::optional<std::vector<Transition>> sample(size_t batch_size,
                                                std::mt19937_64& rng) const;

 private:
  std::vector<Transition> ring_;
  size_t next_ = 0;
  bool full_ = false;
};

struct DdpgConfig {
  double gamma = 1.0;  // finite-horizon episodes carry a terminal flag
  double tau = 0.005;
  int batch_size = 64;
  size_t buffer_capacity = 1'000'000;
  double epsilon = 0.5;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  int hidden = 64;
  nn::Activation hidden_activation = nn::Activation::Tanh;
};

struct Agent {
  nn::MlpNet actor;
  nn::MlpNet critic;  // input (s, a), both scaled
  nn::MlpNet target_actor;
  nn::MlpNet target_critic;
  nn::OptimizerState actor_opt;
  nn::OptimizerState critic_opt;
  double state_scale = 40.0;
  double action_bound = 10.0;
};

Agent make_agent(const DdpgConfig& cfg, double state_scale, double action_bound,
                 std::mt19937_64& rng);

// Greedy policy in raw action units (tanh-scaled actor output).
Mat policy_batch(const Agent& agent, const Mat& states);
env::Action policy_action(const Agent& agent, const env::State& s);

// With probability epsilon a uniform action from the box, otherwise pi(s).
env::Action select_action(const Agent& agent, const env::State& s,
                          double epsilon, std::mt19937_64& rng);

using RewardFn = std::function<double(const Transition&)>;

// y = r + gamma * (1 - terminal) * Q'(s', pi'(s')); target networks only.
Vec critic_targets(const Agent& agent, const std::vector<Transition>& batch,
                   const Vec& rewards, double gamma);

struct TrainResult {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, pi(s)) before the actor step
};

TrainResult train_step(Agent& agent, const std::vector<Transition>& minibatch,
                       const RewardFn& reward_fn, const DdpgConfig& cfg);

}  // namespace infoflow::ddpg
