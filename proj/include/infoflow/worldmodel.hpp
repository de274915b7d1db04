#pragma once

#include <functional>
#include <random>
#include <vector>

#include "infoflow/ddpg.hpp"
#include "infoflow/env.hpp"
#include "infoflow/nn.hpp"
#include "infoflow/types.hpp"

namespace infoflow::wm {

// States divided by state scale and actions by action scale before entering
// the nets; predictions are produced in scaled space and rescaled.
struct ModelScaling {
  double state = 40.0;
  double action = 10.0;
};

// Anything that maps (s, a) to a predicted next state in arena coordinates.
// Learned models, the true dynamics, and test stubs all fit behind this.
class TransitionPredictor {
 public:
  virtual ~TransitionPredictor() = default;
  // states, actions: (batch, 2) raw coordinates. Returns (batch, 2).
  virtual Mat predict_batch(const Mat& states, const Mat& actions) const = 0;

  Vec2 predict(const env::State& s, const env::Action& a) const;
};

class FunctionPredictor final : public TransitionPredictor {
 public:
  using Fn = std::function<Vec2(const env::State&, const env::Action&)>;
  explicit FunctionPredictor(Fn fn) : fn_(std::move(fn)) {}
  Mat predict_batch(const Mat& states, const Mat& actions) const override;

 private:
  Fn fn_;
};

class ForwardModel final : public TransitionPredictor {
 public:
  ForwardModel() = default;
  ForwardModel(nn::MlpNet net, ModelScaling scaling);

  Mat predict_batch(const Mat& states, const Mat& actions) const override;

  nn::MlpNet net;
  ModelScaling scaling;
};

class ExtendedForwardModel {
 public:
  ExtendedForwardModel() = default;
  ExtendedForwardModel(nn::MlpNet net, ModelScaling scaling);

  // next_actions is the policy action at the predicted-for state.
  Mat predict_batch(const Mat& states, const Mat& actions,
                    const Mat& next_actions) const;
  Vec2 predict(const env::State& s, const env::Action& a,
               const env::Action& a_next) const;

  nn::MlpNet net;
  ModelScaling scaling;
};

ForwardModel make_forward_model(const std::vector<int>& hidden,
                                nn::Activation activation, std::mt19937_64& rng,
                                ModelScaling scaling = {});
ExtendedForwardModel make_extended_model(const std::vector<int>& hidden,
                                         nn::Activation activation,
                                         std::mt19937_64& rng,
                                         ModelScaling scaling = {});

Vec2 predict_forward(const ForwardModel& m, const env::State& s,
                     const env::Action& a);
Vec2 predict_extended(const ExtendedForwardModel& m, const env::State& s,
                      const env::Action& a, const env::Action& a_next);

// Batched greedy policy on raw states, returning raw actions.
using BatchPolicy = std::function<Mat(const Mat& states)>;

struct ModelLosses {
  double forward_loss = 0.0;   // mean ||s' - f(s,a)||^2 on the minibatch
  double extended_loss = 0.0;  // mean ||s' - k(s,a,a')||^2
};

// One optimizer step on each model against the minibatch. a' is recomputed
// from `policy` unless use_stored_next_action, which replays the collection
// time a_next instead. Throws on an empty minibatch or a non-finite loss.
ModelLosses train_models(ForwardModel& f, nn::OptimizerState& f_opt,
                         ExtendedForwardModel& k, nn::OptimizerState& k_opt,
                         const std::vector<ddpg::Transition>& minibatch,
                         const BatchPolicy& policy,
                         bool use_stored_next_action = false);

}  // namespace infoflow::wm
