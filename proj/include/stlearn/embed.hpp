#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stlearn/binio.hpp"
#include "stlearn/jsonio.hpp"
#include "stlearn/rng.hpp"
#include "stlearn/vec.hpp"
#include "stlearn/version.hpp"

namespace stlearn {

namespace detail {

/// Orthogonal-ish init: gaussian matrix, Gram-Schmidt over the shorter side,
/// scaled by 1/sqrt(fan_in). Keeps unit-norm inputs at O(1) pre-activations
/// from the first step, which matters because everything downstream is
/// cosine similarity.
inline std::vector<double> init_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::vector<double> w(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (double& x : w) x = std::normal_distribution<double>(0.0, 1.0)(rng);

  const bool by_rows = rows <= cols;
  const int vectors = by_rows ? rows : cols;
  const int length = by_rows ? cols : rows;
  auto at = [&](int v, int i) -> double& {
    return by_rows ? w[static_cast<std::size_t>(v) * static_cast<std::size_t>(cols) +
                       static_cast<std::size_t>(i)]
                   : w[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                       static_cast<std::size_t>(v)];
  };
  for (int v = 0; v < vectors; ++v) {
    for (int u = 0; u < v; ++u) {
      double proj = 0;
      for (int i = 0; i < length; ++i) proj += at(v, i) * at(u, i);
      for (int i = 0; i < length; ++i) at(v, i) -= proj * at(u, i);
    }
    double norm = 0;
    for (int i = 0; i < length; ++i) norm += at(v, i) * at(v, i);
    norm = std::sqrt(norm);
    if (norm < kDegenerateNorm) {
      // pathologically unlucky draw; restart this vector
      for (int i = 0; i < length; ++i) at(v, i) = std::normal_distribution<double>(0.0, 1.0)(rng);
      --v;
      continue;
    }
    for (int i = 0; i < length; ++i) at(v, i) /= norm;
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& x : w) x *= scale;
  return w;
}

}  // namespace detail

/// Intermediates of one forward pass, kept for backprop.
struct ForwardCache {
  FeatureVector input;
  FeatureVector hidden_pre;  // empty for the linear variant
  FeatureVector hidden;
  FeatureVector pre_norm;
  FeatureVector output;
  double pre_norm_len = 0.0;
  bool degenerate = false;
};

struct Gradients {
  std::vector<double> w1, b1, w2, b2;

  void add(const Gradients& g) {
    auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    acc(w1, g.w1);
    acc(b1, g.b1);
    acc(w2, g.w2);
    acc(b2, g.b2);
  }

  void scale(double s) {
    for (auto* v : {&w1, &b1, &w2, &b2}) {
      for (double& x : *v) x *= s;
    }
  }
};

/**
 * The embedding head: either a single linear map or one tanh hidden layer,
 * always followed by L2 normalization onto the unit sphere. Deliberately
 * small — the learning signal under study lives in the losses, not in model
 * capacity.
 */
class EmbedModel {
 public:
  EmbedModel() = default;

  EmbedModel(int in_dim, int out_dim, int hidden_width, std::mt19937_64& rng)
      : in_dim_(in_dim), out_dim_(out_dim), hidden_width_(hidden_width) {
    if (in_dim < 1 || out_dim < 1 || hidden_width < 0) {
      throw std::invalid_argument("embed model: invalid dimensions");
    }
    if (hidden_width_ == 0) {
      w1_ = detail::init_matrix(rng, out_dim_, in_dim_);
      b1_.assign(static_cast<std::size_t>(out_dim_), 0.0);
    } else {
      w1_ = detail::init_matrix(rng, hidden_width_, in_dim_);
      b1_.assign(static_cast<std::size_t>(hidden_width_), 0.0);
      w2_ = detail::init_matrix(rng, out_dim_, hidden_width_);
      b2_.assign(static_cast<std::size_t>(out_dim_), 0.0);
    }
  }

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  int hidden_width() const { return hidden_width_; }
  bool is_linear() const { return hidden_width_ == 0; }

  FeatureVector forward(std::span<const float> raw, ForwardCache* cache = nullptr) const {
    if (static_cast<int>(raw.size()) != in_dim_) {
      throw std::invalid_argument("embed model: input dimension mismatch");
    }
    FeatureVector x(raw.begin(), raw.end());
    FeatureVector hidden_pre, hidden;
    FeatureVector pre_norm;
    if (hidden_width_ == 0) {
      pre_norm = affine(w1_, b1_, x, out_dim_, in_dim_);
    } else {
      hidden_pre = affine(w1_, b1_, x, hidden_width_, in_dim_);
      hidden.resize(hidden_pre.size());
      for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] = std::tanh(hidden_pre[i]);
      pre_norm = affine(w2_, b2_, hidden, out_dim_, hidden_width_);
    }
    FeatureVector out = pre_norm;
    const double len = l2_norm(out);
    const bool ok = normalize_unit(out);
    if (cache) {
      cache->input = std::move(x);
      cache->hidden_pre = std::move(hidden_pre);
      cache->hidden = std::move(hidden);
      cache->pre_norm = std::move(pre_norm);
      cache->output = out;
      cache->pre_norm_len = len;
      cache->degenerate = !ok;
    }
    return out;
  }

  /// Parameter gradients for dL/d(output) = `grad_output`, given the cache
  /// of the corresponding forward pass. At the (measure-zero) degenerate
  /// point the normalization is not differentiable and the gradient is 0.
  Gradients backward(const ForwardCache& cache, const FeatureVector& grad_output) const {
    Gradients g;
    g.w1.assign(w1_.size(), 0.0);
    g.b1.assign(b1_.size(), 0.0);
    g.w2.assign(w2_.size(), 0.0);
    g.b2.assign(b2_.size(), 0.0);
    if (cache.degenerate) return g;

    // through y = v / |v|:  dv = (g - y (y.g)) / |v|
    const double yg = dot(cache.output, grad_output);
    FeatureVector gv(grad_output.size());
    for (std::size_t i = 0; i < gv.size(); ++i) {
      gv[i] = (grad_output[i] - cache.output[i] * yg) / cache.pre_norm_len;
    }

    if (hidden_width_ == 0) {
      affine_backward(g.w1, g.b1, nullptr, gv, cache.input, out_dim_, in_dim_, w1_);
    } else {
      FeatureVector ghidden(static_cast<std::size_t>(hidden_width_), 0.0);
      affine_backward(g.w2, g.b2, &ghidden, gv, cache.hidden, out_dim_, hidden_width_, w2_);
      for (std::size_t i = 0; i < ghidden.size(); ++i) {
        ghidden[i] *= 1.0 - cache.hidden[i] * cache.hidden[i];
      }
      affine_backward(g.w1, g.b1, nullptr, ghidden, cache.input, hidden_width_, in_dim_, w1_);
    }
    return g;
  }

  Gradients zero_gradients() const {
    Gradients g;
    g.w1.assign(w1_.size(), 0.0);
    g.b1.assign(b1_.size(), 0.0);
    g.w2.assign(w2_.size(), 0.0);
    g.b2.assign(b2_.size(), 0.0);
    return g;
  }

  void apply_gradients(const Gradients& g, double learning_rate) {
    auto step = [learning_rate](std::vector<double>& p, const std::vector<double>& gp) {
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * gp[i];
    };
    step(w1_, g.w1);
    step(b1_, g.b1);
    step(w2_, g.w2);
    step(b2_, g.b2);
  }

  // direct parameter access (tests, checkpoints)
  std::vector<double>& w1() { return w1_; }
  std::vector<double>& b1() { return b1_; }
  std::vector<double>& w2() { return w2_; }
  std::vector<double>& b2() { return b2_; }
  const std::vector<double>& w1() const { return w1_; }
  const std::vector<double>& b1() const { return b1_; }
  const std::vector<double>& w2() const { return w2_; }
  const std::vector<double>& b2() const { return b2_; }

 private:
  static FeatureVector affine(const std::vector<double>& w, const std::vector<double>& b,
                              const FeatureVector& x, int rows, int cols) {
    FeatureVector out(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      double acc = b[static_cast<std::size_t>(r)];
      const double* wr = w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
      for (int c = 0; c < cols; ++c) acc += wr[c] * x[static_cast<std::size_t>(c)];
      out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
  }

  static void affine_backward(std::vector<double>& gw, std::vector<double>& gb,
                              FeatureVector* gx, const FeatureVector& gout,
                              const FeatureVector& x, int rows, int cols,
                              const std::vector<double>& w) {
    for (int r = 0; r < rows; ++r) {
      const double gr = gout[static_cast<std::size_t>(r)];
      gb[static_cast<std::size_t>(r)] += gr;
      double* gwr = gw.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
      const double* wr = w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols);
      for (int c = 0; c < cols; ++c) {
        gwr[c] += gr * x[static_cast<std::size_t>(c)];
        if (gx) (*gx)[static_cast<std::size_t>(c)] += gr * wr[c];
      }
    }
  }

  int in_dim_ = 0;
  int out_dim_ = 0;
  int hidden_width_ = 0;
  std::vector<double> w1_, b1_, w2_, b2_;
};

// --- checkpoint: one JSON header line, then the parameters as LE f32 ---

inline void save_model(const EmbedModel& m, const std::filesystem::path& file) {
  Json header;
  header["version"] = kCheckpointFormatVersion;
  header["variant"] = m.is_linear() ? "linear" : "mlp1";
  header["in_dim"] = m.in_dim();
  header["out_dim"] = m.out_dim();
  header["hidden_width"] = m.hidden_width();

  std::vector<unsigned char> payload;
  auto dump = [&payload](const std::vector<double>& p) {
    for (double x : p) append_f32_le(payload, static_cast<float>(x));
  };
  dump(m.w1());
  dump(m.b1());
  dump(m.w2());
  dump(m.b2());

  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  const std::string head = header.dump();
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  os.put('\n');
  write_bytes(os, payload);
}

inline EmbedModel load_model(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  std::string head;
  if (!std::getline(is, head)) throw std::runtime_error("checkpoint: missing header");
  Json header = Json::parse(head);
  const std::string ctx = "checkpoint header";
  require_known_keys(header, ctx, {"version", "variant", "in_dim", "out_dim", "hidden_width"});
  const int version = require_field(header, ctx, "version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw std::runtime_error(ctx + ": unsupported version " + std::to_string(version));
  }
  const std::string variant = require_field(header, ctx, "variant").get<std::string>();
  const int in_dim = require_field(header, ctx, "in_dim").get<int>();
  const int out_dim = require_field(header, ctx, "out_dim").get<int>();
  const int hidden_width = require_field(header, ctx, "hidden_width").get<int>();
  if (variant != "linear" && variant != "mlp1") {
    throw std::runtime_error(ctx + ": unknown variant \"" + variant + "\"");
  }
  if ((variant == "linear") != (hidden_width == 0)) {
    throw std::runtime_error(ctx + ": variant and hidden_width disagree");
  }
  if (in_dim < 1 || out_dim < 1 || hidden_width < 0) {
    throw std::runtime_error(ctx + ": invalid dimensions");
  }

  std::vector<unsigned char> payload = read_all_bytes(is);
  std::vector<float> values = f32_vector_from_le(payload);

  std::mt19937_64 dummy(0);
  EmbedModel m(in_dim, out_dim, hidden_width, dummy);
  std::size_t expected = m.w1().size() + m.b1().size() + m.w2().size() + m.b2().size();
  if (values.size() != expected) {
    throw std::runtime_error("checkpoint: payload holds " + std::to_string(values.size()) +
                             " values, expected " + std::to_string(expected));
  }
  std::size_t off = 0;
  auto fill = [&](std::vector<double>& p) {
    for (double& x : p) x = static_cast<double>(values[off++]);
  };
  fill(m.w1());
  fill(m.b1());
  fill(m.w2());
  fill(m.b2());
  return m;
}

}  // namespace stlearn
