#include "infoflow/worldmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace infoflow::wm {

namespace {

std::vector<int> layer_sizes(int input, const std::vector<int>& hidden,
                             int output) {
  std::vector<int> sizes;
  sizes.push_back(input);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output);
  return sizes;
}

}  // namespace

Vec2 TransitionPredictor::predict(const env::State& s,
                                  const env::Action& a) const {
  Mat states(1, 2), actions(1, 2);
  states << s.x, s.y;
  actions << a.ax, a.ay;
  Mat out = predict_batch(states, actions);
  return Vec2(out(0, 0), out(0, 1));
}

Mat FunctionPredictor::predict_batch(const Mat& states,
                                     const Mat& actions) const {
  Mat out(states.rows(), 2);
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    out.row(i) = fn_(env::State{states(i, 0), states(i, 1)},
                     env::Action{actions(i, 0), actions(i, 1)})
                     .transpose();
  }
  return out;
}

ForwardModel::ForwardModel(nn::MlpNet net_in, ModelScaling scaling_in)
    : net(std::move(net_in)), scaling(scaling_in) {
  if (net.input_dim() != 4 || net.output_dim() != 2) {
    throw std::invalid_argument("forward model must map 4 inputs to 2 outputs");
  }
}

Mat ForwardModel::predict_batch(const Mat& states, const Mat& actions) const {
  Mat x(states.rows(), 4);
  x.leftCols<2>() = states / scaling.state;
  x.rightCols<2>() = actions / scaling.action;
  return nn::forward(net, x) * scaling.state;
}

ExtendedForwardModel::ExtendedForwardModel(nn::MlpNet net_in,
                                           ModelScaling scaling_in)
    : net(std::move(net_in)), scaling(scaling_in) {
  if (net.input_dim() != 6 || net.output_dim() != 2) {
    throw std::invalid_argument(
        "extended forward model must map 6 inputs to 2 outputs");
  }
}

Mat ExtendedForwardModel::predict_batch(const Mat& states, const Mat& actions,
                                        const Mat& next_actions) const {
  Mat x(states.rows(), 6);
  x.leftCols<2>() = states / scaling.state;
  x.middleCols<2>(2) = actions / scaling.action;
  x.rightCols<2>() = next_actions / scaling.action;
  return nn::forward(net, x) * scaling.state;
}

Vec2 ExtendedForwardModel::predict(const env::State& s, const env::Action& a,
                                   const env::Action& a_next) const {
  Mat states(1, 2), actions(1, 2), next(1, 2);
  states << s.x, s.y;
  actions << a.ax, a.ay;
  next << a_next.ax, a_next.ay;
  Mat out = predict_batch(states, actions, next);
  return Vec2(out(0, 0), out(0, 1));
}

ForwardModel make_forward_model(const std::vector<int>& hidden,
                                nn::Activation activation, std::mt19937_64& rng,
                                ModelScaling scaling) {
  return ForwardModel(nn::make_mlp(layer_sizes(4, hidden, 2), activation,
                                   nn::Activation::Linear, 1.0, rng),
                      scaling);
}

ExtendedForwardModel make_extended_model(const std::vector<int>& hidden,
                                         nn::Activation activation,
                                         std::mt19937_64& rng,
                                         ModelScaling scaling) {
  return ExtendedForwardModel(nn::make_mlp(layer_sizes(6, hidden, 2),
                                           activation, nn::Activation::Linear,
                                           1.0, rng),
                              scaling);
}

Vec2 predict_forward(const ForwardModel& m, const env::State& s,
                     const env::Action& a) {
  return m.predict(s, a);
}

Vec2 predict_extended(const ExtendedForwardModel& m, const env::State& s,
                      const env::Action& a, const env::Action& a_next) {
  return m.predict(s, a, a_next);
}

ModelLosses train_models(ForwardModel& f, nn::OptimizerState& f_opt,
                         ExtendedForwardModel& k, nn::OptimizerState& k_opt,
                         const std::vector<ddpg::Transition>& minibatch,
                         const BatchPolicy& policy,
                         bool use_stored_next_action) {
  if (minibatch.empty()) {
    throw std::invalid_argument("train_models: minibatch is empty");
  }
  const Eigen::Index batch = static_cast<Eigen::Index>(minibatch.size());
  Mat states(batch, 2), actions(batch, 2), next_states(batch, 2);
  Mat stored_next(batch, 2);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const auto& t = minibatch[i];
    states.row(i) << t.s.x, t.s.y;
    actions.row(i) << t.a.ax, t.a.ay;
    next_states.row(i) << t.s_next.x, t.s_next.y;
    stored_next.row(i) << t.a_next.ax, t.a_next.ay;
  }
  // a' is treated as a constant input; no gradient flows into the policy.
  const Mat next_actions =
      use_stored_next_action ? stored_next : policy(next_states);

  const double state_scale = f.scaling.state;
  const Mat target = next_states / state_scale;
  // Raw-coordinate MSE is (state_scale)^2 times the scaled-space MSE the
  // gradient descends on; both have the same minimizer.
  const double to_raw = state_scale * state_scale;

  ModelLosses losses;
  {
    Mat x(batch, 4);
    x.leftCols<2>() = states / f.scaling.state;
    x.rightCols<2>() = actions / f.scaling.action;
    nn::ForwardTrace trace = nn::forward_trace(f.net, x);
    Mat residual = trace.output() - target;
    losses.forward_loss =
        to_raw * residual.squaredNorm() / static_cast<double>(batch);
    if (!std::isfinite(losses.forward_loss)) {
      throw std::runtime_error("train_models: forward model loss is not finite");
    }
    Mat out_grad = (2.0 / static_cast<double>(batch)) * residual;
    nn::Gradients grads = nn::backward(f.net, trace, out_grad);
    nn::optimizer_step(f.net, grads, f_opt);
  }
  {
    Mat x(batch, 6);
    x.leftCols<2>() = states / k.scaling.state;
    x.middleCols<2>(2) = actions / k.scaling.action;
    x.rightCols<2>() = next_actions / k.scaling.action;
    nn::ForwardTrace trace = nn::forward_trace(k.net, x);
    Mat residual = trace.output() - target;
    losses.extended_loss =
        to_raw * residual.squaredNorm() / static_cast<double>(batch);
    if (!std::isfinite(losses.extended_loss)) {
      throw std::runtime_error(
          "train_models: extended forward model loss is not finite");
    }
    Mat out_grad = (2.0 / static_cast<double>(batch)) * residual;
    nn::Gradients grads = nn::backward(k.net, trace, out_grad);
    nn::optimizer_step(k.net, grads, k_opt);
  }
  return losses;
}

}  // namespace infoflow::wm
