#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stlearn/assoc.hpp"
#include "stlearn/core.hpp"
#include "stlearn/memory.hpp"
#include "stlearn/vec.hpp"

namespace stlearn {

/// Max-subtracted softmax; safe for any logit range.
inline std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  double max_logit = logits[0];
  for (double l : logits) max_logit = std::max(max_logit, l);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - max_logit);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

/// Matching probability of x against every tracklet of one camera:
/// softmax over z_k.x / tau.
inline std::vector<double> matching_distribution(const FeatureVector& x,
                                                 const std::vector<FeatureVector>& camera_bank,
                                                 double tau) {
  if (camera_bank.empty()) {
    throw std::invalid_argument("matching_distribution: empty camera bank");
  }
  if (!(tau > 0)) throw std::invalid_argument("matching_distribution: tau must be > 0");
  std::vector<double> logits(camera_bank.size());
  for (std::size_t i = 0; i < camera_bank.size(); ++i) logits[i] = dot(camera_bank[i], x) / tau;
  return softmax(logits);
}

/// Soft target over one camera's bank, keyed by bank index (label).
struct SoftTarget {
  std::vector<std::pair<std::size_t, double>> entries;
};

/// Resolve a weight row (keyed by global tracklet id) into bank positions of
/// `camera`. Weight mass on a tracklet of another camera is an error: the
/// matching distribution is normalized within one camera only.
inline SoftTarget to_soft_target(const WeightRow& row, const MemoryBank& bank, int camera) {
  SoftTarget target;
  target.entries.reserve(row.size());
  for (const WeightedNeighbor& wn : row) {
    const auto [cam, label] = bank.locate(wn.id);
    if (cam != camera) {
      throw std::out_of_range("soft target: tracklet " + std::to_string(wn.id) +
                              " is outside camera " + std::to_string(camera));
    }
    target.entries.push_back({label, wn.weight});
  }
  return target;
}

struct LossGrad {
  double loss = 0.0;
  FeatureVector grad_x;
};

/**
 * Per-camera selective matching loss: soft cross-entropy of the matching
 * distribution against the association weight row.
 *   loss   = -sum_j w_j log P(z_j | x)
 *   grad_x = (1/tau) sum_k (p_k - w_k) z_k
 * Bank entries are constants; the gradient flows into x only.
 */
inline LossGrad pcm_loss(const FeatureVector& x, const std::vector<FeatureVector>& camera_bank,
                         const SoftTarget& target, double tau) {
  if (camera_bank.empty()) throw std::invalid_argument("pcm loss: empty camera bank");
  if (!(tau > 0)) throw std::invalid_argument("pcm loss: tau must be > 0");

  std::vector<double> logits(camera_bank.size());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < camera_bank.size(); ++i) {
    logits[i] = dot(camera_bank[i], x) / tau;
    max_logit = std::max(max_logit, logits[i]);
  }
  double z = 0.0;
  for (double l : logits) z += std::exp(l - max_logit);
  const double log_z = max_logit + std::log(z);

  LossGrad out;
  out.grad_x.assign(x.size(), 0.0);
  for (std::size_t k = 0; k < camera_bank.size(); ++k) {
    const double p_k = std::exp(logits[k] - log_z);
    add_scaled(out.grad_x, camera_bank[k], p_k / tau);
  }
  for (const auto& [index, weight] : target.entries) {
    if (index >= camera_bank.size()) {
      throw std::out_of_range("pcm loss: target index outside the camera bank");
    }
    out.loss += weight * (log_z - logits[index]);
    add_scaled(out.grad_x, camera_bank[index], -weight / tau);
  }
  return out;
}

/// Cross-camera matching loss: sum of (1 - z'.x) over the discovered
/// cross-camera neighbors; zero (with zero gradient) when none were found.
inline LossGrad ccm_loss(const FeatureVector& x, const NeighborSet& cross_neighbors,
                         const MemoryBank& bank) {
  LossGrad out;
  out.grad_x.assign(x.size(), 0.0);
  for (const NeighborEntry& e : cross_neighbors) {
    const FeatureVector& z = bank.representation(e.id);
    out.loss += 1.0 - dot(z, x);
    add_scaled(out.grad_x, z, -1.0);
  }
  return out;
}

inline double stl_loss(double pcm, double ccm, double lambda) {
  if (lambda < 0) throw std::invalid_argument("stl loss: lambda must be >= 0");
  return pcm + lambda * ccm;
}

/**
 * Parametric per-camera softmax classifier, the conventional baseline the
 * selective losses are measured against. One weight vector per tracklet
 * label, zero-initialized, no temperature.
 */
class CameraClassifier {
 public:
  CameraClassifier() = default;

  CameraClassifier(const TrackletDataset& ds, int embed_dim) : dim_(embed_dim) {
    weights_.resize(static_cast<std::size_t>(ds.cameras()));
    for (int m = 0; m < ds.cameras(); ++m) {
      weights_[static_cast<std::size_t>(m)].assign(
          ds.camera_tracklets(m).size() * static_cast<std::size_t>(embed_dim), 0.0);
    }
  }

  int dim() const { return dim_; }

  std::size_t labels(int camera) const {
    return weights_.at(static_cast<std::size_t>(camera)).size() /
           static_cast<std::size_t>(dim_);
  }

  std::span<const double> weight_row(int camera, std::size_t label) const {
    const auto& w = weights_.at(static_cast<std::size_t>(camera));
    return std::span<const double>(w.data() + label * static_cast<std::size_t>(dim_),
                                   static_cast<std::size_t>(dim_));
  }

  struct CeResult {
    double loss = 0.0;
    FeatureVector grad_x;
    std::vector<double> grad_w;  // gradient for the camera's whole weight block
  };

  CeResult ce_loss(const FeatureVector& x, int camera, std::size_t label) const {
    const auto& w = weights_.at(static_cast<std::size_t>(camera));
    const std::size_t n = labels(camera);
    if (label >= n) throw std::out_of_range("ce loss: label out of range");
    if (static_cast<int>(x.size()) != dim_) {
      throw std::invalid_argument("ce loss: feature dimension mismatch");
    }

    std::vector<double> logits(n);
    for (std::size_t k = 0; k < n; ++k) {
      logits[k] = dot(std::span<const double>(w.data() + k * static_cast<std::size_t>(dim_),
                                              static_cast<std::size_t>(dim_)),
                      std::span<const double>(x));
    }
    std::vector<double> p = softmax(logits);

    CeResult out;
    out.loss = -std::log(std::max(p[label], 1e-300));
    out.grad_x.assign(x.size(), 0.0);
    out.grad_w.assign(w.size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double g = p[k] - (k == label ? 1.0 : 0.0);
      const double* wk = w.data() + k * static_cast<std::size_t>(dim_);
      double* gwk = out.grad_w.data() + k * static_cast<std::size_t>(dim_);
      for (std::size_t i = 0; i < x.size(); ++i) {
        out.grad_x[i] += g * wk[i];
        gwk[i] += g * x[i];
      }
    }
    return out;
  }

  void apply_gradients(int camera, const std::vector<double>& grad_w, double learning_rate) {
    auto& w = weights_.at(static_cast<std::size_t>(camera));
    if (grad_w.size() != w.size()) {
      throw std::invalid_argument("classifier update: gradient size mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * grad_w[i];
  }

 private:
  int dim_ = 0;
  std::vector<std::vector<double>> weights_;  // [camera] -> row-major labels x dim
};

}  // namespace stlearn
