// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0

#include "ttrec/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "ttrec/error.hpp"
#include "ttrec/io/fileio.hpp"

namespace ttrec::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

void validate(const Mlp& net) {
  require(!net.layers.empty(), Errc::config_invalid, "network needs at least one layer");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& lay = net.layers[l];
    const std::string where = "layer " + std::to_string(l);
    require(lay.weights.rows() > 0 && lay.weights.cols() > 0, Errc::config_invalid,
            where + ": empty weight matrix");
    require(lay.bias.size() == lay.weights.rows(), Errc::dimension_mismatch,
            where + ": bias size " + std::to_string(lay.bias.size()) + " != rows " +
                std::to_string(lay.weights.rows()));
    if (l > 0) {
      require(lay.weights.cols() == net.layers[l - 1].weights.rows(), Errc::dimension_mismatch,
              where + ": input dim " + std::to_string(lay.weights.cols()) +
                  " != previous output dim " + std::to_string(net.layers[l - 1].weights.rows()));
    }
    require(lay.weights.allFinite() && lay.bias.allFinite(), Errc::config_invalid,
            where + ": non-finite parameter");
  }
}

VectorXd forward(const Mlp& net, const VectorXd& x) {
  require(x.size() == net.input_dim(), Errc::dimension_mismatch,
          "forward: input size " + std::to_string(x.size()) + " != network input dim " +
              std::to_string(net.input_dim()));
  VectorXd a = x;
  const std::size_t L = net.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    VectorXd z = net.layers[l].weights * a + net.layers[l].bias;
    if (l + 1 < L) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = activate(net.activation, z[i]);
    }
    a = std::move(z);
  }
  return a;
}

MatrixXd forward_batch(const Mlp& net, const MatrixXd& X) {
  require(X.cols() == net.input_dim(), Errc::dimension_mismatch,
          "forward_batch: input dim " + std::to_string(X.cols()) + " != network input dim " +
              std::to_string(net.input_dim()));
  MatrixXd A = X;
  const std::size_t L = net.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    MatrixXd Z = A * net.layers[l].weights.transpose();
    Z.rowwise() += net.layers[l].bias.transpose();
    if (l + 1 < L) {
      if (net.activation == Activation::relu) {
        Z = Z.cwiseMax(0.0);
      } else {
        Z = Z.unaryExpr([](double v) { return activate(Activation::sigmoid, v); });
      }
    }
    A = std::move(Z);
  }
  return A;
}

void MlpGrad::setZero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : bias) b.setZero();
}

void MlpGrad::add_scaled(const MlpGrad& other, double scale) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l].noalias() += scale * other.weights[l];
    bias[l].noalias() += scale * other.bias[l];
  }
}

MlpGrad make_zero_grad(const Mlp& net) {
  MlpGrad g;
  g.weights.reserve(net.layers.size());
  g.bias.reserve(net.layers.size());
  for (const auto& lay : net.layers) {
    g.weights.emplace_back(MatrixXd::Zero(lay.weights.rows(), lay.weights.cols()));
    g.bias.emplace_back(VectorXd::Zero(lay.bias.size()));
  }
  return g;
}

MlpGrad backward(const Mlp& net, const VectorXd& x, const VectorXd& upstream) {
  require(upstream.size() == net.output_dim(), Errc::dimension_mismatch,
          "backward: upstream size != network output dim");
  const std::size_t L = net.layers.size();

  // Forward pass keeping pre-activations and activations.
  std::vector<VectorXd> acts(L + 1);   // acts[0] = x, acts[l] = output of layer l
  std::vector<VectorXd> preacts(L);    // layer l pre-activation
  acts[0] = x;
  for (std::size_t l = 0; l < L; ++l) {
    preacts[l] = net.layers[l].weights * acts[l] + net.layers[l].bias;
    if (l + 1 < L) {
      VectorXd a(preacts[l].size());
      for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = activate(net.activation, preacts[l][i]);
      acts[l + 1] = std::move(a);
    } else {
      acts[l + 1] = preacts[l];
    }
  }

  MlpGrad g = make_zero_grad(net);
  VectorXd delta = upstream;  // last layer is linear
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l].noalias() = delta * acts[l].transpose();
    g.bias[l] = delta;
    if (l > 0) {
      VectorXd back = net.layers[l].weights.transpose() * delta;
      for (Eigen::Index i = 0; i < back.size(); ++i)
        back[i] *= activate_deriv(net.activation, preacts[l - 1][i]);
      delta = std::move(back);
    }
  }
  return g;
}

MlpGrad backward_batch(const Mlp& net, const MatrixXd& X, const MatrixXd& upstream) {
  require(upstream.rows() == X.rows(), Errc::dimension_mismatch,
          "backward_batch: upstream rows != batch rows");
  require(upstream.cols() == net.output_dim(), Errc::dimension_mismatch,
          "backward_batch: upstream cols != network output dim");
  const std::size_t L = net.layers.size();

  std::vector<MatrixXd> acts(L + 1);
  std::vector<MatrixXd> preacts(L);
  acts[0] = X;
  for (std::size_t l = 0; l < L; ++l) {
    MatrixXd Z = acts[l] * net.layers[l].weights.transpose();
    Z.rowwise() += net.layers[l].bias.transpose();
    preacts[l] = Z;
    if (l + 1 < L) {
      if (net.activation == Activation::relu) {
        acts[l + 1] = Z.cwiseMax(0.0);
      } else {
        acts[l + 1] = Z.unaryExpr([](double v) { return activate(Activation::sigmoid, v); });
      }
    } else {
      acts[l + 1] = std::move(Z);
    }
  }

  MlpGrad g = make_zero_grad(net);
  MatrixXd delta = upstream;  // batch x out
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l].noalias() = delta.transpose() * acts[l];
    g.bias[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      MatrixXd back = delta * net.layers[l].weights;  // batch x in
      if (net.activation == Activation::relu) {
        back = back.cwiseProduct(
            (preacts[l - 1].array() > 0.0).cast<double>().matrix());
      } else {
        back = back.cwiseProduct(preacts[l - 1].unaryExpr(
            [](double v) { return activate_deriv(Activation::sigmoid, v); }));
      }
      delta = std::move(back);
    }
  }
  return g;
}

namespace {

// Interval propagation of [0,1]^D through the network; monotone activations
// map interval endpoints to interval endpoints.
double interval_output_bound(const Mlp& net) {
  const std::size_t L = net.layers.size();
  VectorXd lo = VectorXd::Zero(net.input_dim());
  VectorXd hi = VectorXd::Ones(net.input_dim());
  for (std::size_t l = 0; l < L; ++l) {
    const auto& W = net.layers[l].weights;
    const auto& b = net.layers[l].bias;
    VectorXd nlo(W.rows()), nhi(W.rows());
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double acc_lo = b[i], acc_hi = b[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j) {
        const double w = W(i, j);
        const double a = w * lo[j], c = w * hi[j];
        acc_lo += std::min(a, c);
        acc_hi += std::max(a, c);
      }
      if (l + 1 < L) {
        acc_lo = activate(net.activation, acc_lo);
        acc_hi = activate(net.activation, acc_hi);
      }
      nlo[i] = acc_lo;
      nhi[i] = acc_hi;
    }
    lo = std::move(nlo);
    hi = std::move(nhi);
  }
  double bound = 0.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    bound = std::max(bound, std::max(std::abs(lo[i]), std::abs(hi[i])));
  return bound;
}

}  // namespace

ArchStats arch_stats(const Mlp& net) {
  validate(net);
  ArchStats s;
  s.depth = net.depth();
  for (const auto& lay : net.layers) {
    for (Eigen::Index i = 0; i < lay.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < lay.weights.cols(); ++j)
        if (lay.weights(i, j) != 0.0) ++s.effective_params;
    for (Eigen::Index i = 0; i < lay.bias.size(); ++i)
      if (lay.bias[i] != 0.0) ++s.effective_params;
    s.param_scale = std::max(
        s.param_scale, std::max(lay.weights.cwiseAbs().maxCoeff(),
                                lay.bias.size() > 0 ? lay.bias.cwiseAbs().maxCoeff() : 0.0));
  }
  s.output_bound = interval_output_bound(net);
  return s;
}

Mlp glorot_init(const std::vector<int>& dims, Activation act, Rng& rng) {
  require(dims.size() >= 2, Errc::invalid_argument, "glorot_init: need at least input and output dims");
  for (int d : dims)
    require(d > 0, Errc::invalid_argument, "glorot_init: all dims must be positive");
  Mlp net;
  net.activation = act;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l], fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    LayerParams lay;
    lay.weights.resize(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) lay.weights(i, j) = rng.uniform(-limit, limit);
    lay.bias = VectorXd::Zero(fan_out);
    net.layers.push_back(std::move(lay));
  }
  return net;
}

json mlp_to_json(const Mlp& net) {
  validate(net);
  json layers = json::array();
  for (const auto& lay : net.layers) {
    json weights = json::array();
    for (Eigen::Index i = 0; i < lay.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < lay.weights.cols(); ++j) weights.push_back(lay.weights(i, j));
    json bias = json::array();
    for (Eigen::Index i = 0; i < lay.bias.size(); ++i) bias.push_back(lay.bias[i]);
    layers.push_back({{"rows", lay.weights.rows()},
                      {"cols", lay.weights.cols()},
                      {"weights", std::move(weights)},
                      {"bias", std::move(bias)}});
  }
  return json{{"format_version", 1},
              {"activation", activation_name(net.activation)},
              {"layers", std::move(layers)}};
}

Mlp mlp_from_json(const json& doc) {
  require(doc.is_object(), Errc::config_parse, "network document must be an object");
  require(doc.contains("format_version") && doc["format_version"].is_number_integer(),
          Errc::config_parse, "network document missing integer format_version");
  require(doc["format_version"].get<int>() == 1, Errc::config_invalid,
          "unsupported network format_version " + doc["format_version"].dump());
  require(doc.contains("activation") && doc["activation"].is_string(), Errc::config_parse,
          "network document missing activation");
  require(doc.contains("layers") && doc["layers"].is_array() && !doc["layers"].empty(),
          Errc::config_parse, "network document missing non-empty layers array");

  Mlp net;
  net.activation = activation_from_name(doc["activation"].get<std::string>());
  for (const auto& entry : doc["layers"]) {
    require(entry.is_object() && entry.contains("rows") && entry.contains("cols") &&
                entry.contains("weights") && entry.contains("bias"),
            Errc::config_parse, "layer entry missing rows/cols/weights/bias");
    const auto rows = entry["rows"].get<Eigen::Index>();
    const auto cols = entry["cols"].get<Eigen::Index>();
    require(rows > 0 && cols > 0, Errc::config_invalid, "layer dims must be positive");
    const auto& w = entry["weights"];
    const auto& b = entry["bias"];
    require(w.is_array() && static_cast<Eigen::Index>(w.size()) == rows * cols,
            Errc::config_invalid, "weights array size != rows*cols");
    require(b.is_array() && static_cast<Eigen::Index>(b.size()) == rows, Errc::config_invalid,
            "bias array size != rows");
    LayerParams lay;
    lay.weights.resize(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) lay.weights(i, j) = w[k++].get<double>();
    lay.bias.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) lay.bias[i] = b[i].get<double>();
    net.layers.push_back(std::move(lay));
  }
  validate(net);
  return net;
}

void save_mlp(const Mlp& net, const std::string& path) {
  io::atomic_write_text_file(path, mlp_to_json(net).dump(2) + "\n");
}

Mlp load_mlp(const std::string& path) {
  json doc;
  try {
    doc = json::parse(io::read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(Errc::config_parse, std::string("network document parse error: ") + e.what());
  }
  return mlp_from_json(doc);
}

}  // namespace ttrec::nn
