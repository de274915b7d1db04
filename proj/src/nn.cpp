#include "infoflow/nn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace infoflow::nn {

namespace {

void apply_activation(Mat& z, Activation act, double scale) {
  switch (act) {
    case Activation::Linear:
      break;
    case Activation::Tanh:
      z = z.array().tanh();
      break;
    case Activation::Relu:
      z = z.array().max(0.0);
      break;
    case Activation::ScaledTanh:
      z = scale * z.array().tanh();
      break;
  }
}

// Derivative of the activation expressed through its output value.
Mat activation_deriv(const Mat& post, Activation act, double scale) {
  switch (act) {
    case Activation::Linear:
      return Mat::Ones(post.rows(), post.cols());
    case Activation::Tanh:
      return (1.0 - post.array().square()).matrix();
    case Activation::Relu:
      return (post.array() > 0.0).cast<double>().matrix();
    case Activation::ScaledTanh:
      return (scale * (1.0 - (post.array() / scale).square())).matrix();
  }
  return Mat();
}

void check_input_dim(const MlpNet& net, Eigen::Index cols) {
  if (cols != net.input_dim()) {
    throw std::invalid_argument("nn: input has " + std::to_string(cols) +
                                " columns, net expects " +
                                std::to_string(net.input_dim()));
  }
}

}  // namespace

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::ScaledTanh: return "scaled-tanh";
  }
  return "linear";
}

Activation activation_from_name(const std::string& name) {
  if (name == "linear") return Activation::Linear;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "scaled-tanh") return Activation::ScaledTanh;
  throw std::invalid_argument("nn: unknown activation '" + name + "'");
}

MlpNet make_mlp(const std::vector<int>& layer_sizes, Activation hidden,
                Activation output, double output_scale, std::mt19937_64& rng) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("nn: need at least input and output layers");
  }
  for (int n : layer_sizes) {
    if (n <= 0) throw std::invalid_argument("nn: layer sizes must be positive");
  }
  MlpNet net;
  net.layer_sizes = layer_sizes;
  net.hidden_activation = hidden;
  net.output_activation = output;
  net.output_scale = output_scale;
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Mat w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    }
    Vec b(fan_out);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

Mat forward(const MlpNet& net, const Mat& x) {
  check_input_dim(net, x.cols());
  Mat a = x;
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    Mat z = a * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    const bool last = (l == layers - 1);
    apply_activation(z, last ? net.output_activation : net.hidden_activation,
                     net.output_scale);
    a = std::move(z);
  }
  return a;
}

Vec forward(const MlpNet& net, const Vec& x) {
  Mat row = forward(net, Mat(x.transpose()));
  return row.row(0).transpose();
}

ForwardTrace forward_trace(const MlpNet& net, const Mat& x) {
  check_input_dim(net, x.cols());
  ForwardTrace trace;
  trace.post.reserve(net.layer_count() + 1);
  trace.post.push_back(x);
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    Mat z = trace.post.back() * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    const bool last = (l == layers - 1);
    apply_activation(z, last ? net.output_activation : net.hidden_activation,
                     net.output_scale);
    trace.post.push_back(std::move(z));
  }
  return trace;
}

Gradients backward(const MlpNet& net, const ForwardTrace& trace,
                   const Mat& output_grad) {
  const int layers = net.layer_count();
  if (output_grad.rows() != trace.post.back().rows() ||
      output_grad.cols() != trace.post.back().cols()) {
    throw std::invalid_argument("nn: output_grad shape does not match output");
  }
  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);

  Mat delta = output_grad.cwiseProduct(activation_deriv(
      trace.post.back(), net.output_activation, net.output_scale));
  for (int l = layers - 1; l >= 0; --l) {
    grads.weights[l] = delta.transpose() * trace.post[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * net.weights[l])
                  .cwiseProduct(activation_deriv(
                      trace.post[l], net.hidden_activation, net.output_scale));
    } else {
      grads.input = delta * net.weights[0];
    }
  }
  return grads;
}

Gradients grad(const MlpNet& net, const Vec& x, const Vec& loss_grad_at_output) {
  if (loss_grad_at_output.size() != net.output_dim()) {
    throw std::invalid_argument("nn: loss gradient size does not match output");
  }
  ForwardTrace trace = forward_trace(net, Mat(x.transpose()));
  return backward(net, trace, Mat(loss_grad_at_output.transpose()));
}

OptimizerState make_optimizer(const MlpNet& net, double learning_rate) {
  OptimizerState state;
  state.learning_rate = learning_rate;
  for (int l = 0; l < net.layer_count(); ++l) {
    state.m_w.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    state.v_w.push_back(Mat::Zero(net.weights[l].rows(), net.weights[l].cols()));
    state.m_b.push_back(Vec::Zero(net.biases[l].size()));
    state.v_b.push_back(Vec::Zero(net.biases[l].size()));
  }
  return state;
}

namespace {

template <typename T>
void adam_update(T& param, const T& g, T& m, T& v, const OptimizerState& s,
                 double bias1, double bias2, const char* what, int layer) {
  if (!g.allFinite()) {
    throw std::runtime_error("nn: non-finite gradient in layer " +
                             std::to_string(layer) + " " + what);
  }
  m = s.beta1 * m + (1.0 - s.beta1) * g;
  v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
  param.array() -= s.learning_rate * (m.array() / bias1) /
                   ((v.array() / bias2).sqrt() + s.epsilon);
}

}  // namespace

void optimizer_step(MlpNet& net, const Gradients& grads, OptimizerState& state) {
  if (static_cast<int>(grads.weights.size()) != net.layer_count()) {
    throw std::invalid_argument("nn: gradient layer count mismatch");
  }
  for (int l = 0; l < net.layer_count(); ++l) {
    if (grads.weights[l].rows() != net.weights[l].rows() ||
        grads.weights[l].cols() != net.weights[l].cols() ||
        grads.biases[l].size() != net.biases[l].size()) {
      throw std::invalid_argument("nn: gradient shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
  state.step_count += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, state.step_count);
  const double bias2 = 1.0 - std::pow(state.beta2, state.step_count);
  for (int l = 0; l < net.layer_count(); ++l) {
    adam_update(net.weights[l], grads.weights[l], state.m_w[l], state.v_w[l],
                state, bias1, bias2, "weights", l);
    adam_update(net.biases[l], grads.biases[l], state.m_b[l], state.v_b[l],
                state, bias1, bias2, "biases", l);
  }
}

void polyak_update(MlpNet& target, const MlpNet& source, double tau) {
  if (target.layer_sizes != source.layer_sizes) {
    throw std::invalid_argument("nn: polyak_update architecture mismatch");
  }
  for (int l = 0; l < target.layer_count(); ++l) {
    target.weights[l] = tau * source.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * source.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

namespace {

void write_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void save_params(const MlpNet& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("nn: cannot open '" + path.string() +
                             "' for writing");
  }
  out << "infoflow-mlp 1\n";
  out << "layers";
  for (int n : net.layer_sizes) out << ' ' << n;
  out << '\n';
  out << "hidden " << activation_name(net.hidden_activation) << '\n';
  out << "output " << activation_name(net.output_activation) << ' ';
  write_value(out, net.output_scale);
  out << '\n';
  for (int l = 0; l < net.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < net.weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < net.weights[l].cols(); ++j) {
        if (j > 0) out << ' ';
        write_value(out, net.weights[l](i, j));
      }
      out << '\n';
    }
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
      if (i > 0) out << ' ';
      write_value(out, net.biases[l](i));
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("nn: write failed for '" + path.string() + "'");
  }
}

MlpNet load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("nn: cannot open '" + path.string() + "'");
  }
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "infoflow-mlp" || version != 1) {
    throw std::runtime_error("nn: '" + path.string() +
                             "' is not an infoflow-mlp v1 snapshot");
  }
  std::string key;
  in >> key;
  if (key != "layers") throw std::runtime_error("nn: missing layers header");
  std::vector<int> sizes;
  {
    std::string rest;
    std::getline(in, rest);
    std::istringstream line(rest);
    int n;
    while (line >> n) sizes.push_back(n);
  }
  if (sizes.size() < 2) throw std::runtime_error("nn: bad layer list");
  MlpNet net;
  net.layer_sizes = sizes;
  std::string name;
  in >> key >> name;
  if (key != "hidden") throw std::runtime_error("nn: missing hidden header");
  net.hidden_activation = activation_from_name(name);
  in >> key >> name >> net.output_scale;
  if (key != "output") throw std::runtime_error("nn: missing output header");
  net.output_activation = activation_from_name(name);
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    Mat w(sizes[l + 1], sizes[l]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (!(in >> w(i, j))) {
          throw std::runtime_error("nn: truncated snapshot '" + path.string() +
                                   "'");
        }
      }
    }
    Vec b(sizes[l + 1]);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (!(in >> b(i))) {
        throw std::runtime_error("nn: truncated snapshot '" + path.string() +
                                 "'");
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace infoflow::nn
