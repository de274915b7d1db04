#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "infoflow/types.hpp"

namespace infoflow::nn {

enum class Activation { Linear, Tanh, Relu, ScaledTanh };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Fixed-topology fully connected net. weights[l] has shape
// (layer_sizes[l+1], layer_sizes[l]); batches are row-per-sample.
struct MlpNet {
  std::vector<int> layer_sizes;
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  Activation hidden_activation = Activation::Tanh;
  Activation output_activation = Activation::Linear;
  double output_scale = 1.0;  // only read for ScaledTanh output

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

// Scaled uniform fan-in init: W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
MlpNet make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
                Activation output, double output_scale, std::mt19937_64& rng);

Mat forward(const MlpNet& net, const Mat& x);
Vec forward(const MlpNet& net, const Vec& x);

// Activations kept for backprop. post[0] is the input, post[l] the output of
// layer l; activation derivatives are recovered from post values alone.
struct ForwardTrace {
  std::vector<Mat> post;

  const Mat& output() const { return post.back(); }
};

ForwardTrace forward_trace(const MlpNet& net, const Mat& x);

// Gradients sum over batch rows; fold any 1/batch factor into output_grad.
struct Gradients {
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  Mat input;  // dLoss/dInput, same shape as the traced input
};

Gradients backward(const MlpNet& net, const ForwardTrace& trace,
                   const Mat& output_grad);
Gradients grad(const MlpNet& net, const Vec& x, const Vec& loss_grad_at_output);

struct OptimizerState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<Mat> m_w, v_w;
  std::vector<Vec> m_b, v_b;
  long step_count = 0;
};

OptimizerState make_optimizer(const MlpNet& net, double learning_rate);

// One Adam step. Throws on a non-finite gradient component, naming the
// offending parameter tensor.
void optimizer_step(MlpNet& net, const Gradients& grads, OptimizerState& state);

// theta_target <- tau * theta_source + (1 - tau) * theta_target
void polyak_update(MlpNet& target, const MlpNet& source, double tau);

// Plain-text snapshot, lossless for IEEE doubles (%.17g). Header records the
// layer sizes and activations; see README for the exact layout.
void save_params(const MlpNet& net, const std::filesystem::path& path);
MlpNet load_params(const std::filesystem::path& path);

}  // namespace infoflow::nn
