#pragma once

#include <vector>

#include "losc/types.hpp"

namespace losc {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using ParamsRef = Eigen::Ref<const VecX>;
using GradRef = Eigen::Ref<VecX>;

/// Four-layer recurrent network: tanh dense -> GRU -> tanh dense -> linear.
struct NetSpec {
  int obs_dim = 8;
  int hidden1 = 80;
  int hidden2 = 49;  // recurrent width
  int hidden3 = 30;
  int out_dim = 3;

  /// Policy widths: 10*obs, round(sqrt(h1*h3)), 10*act, act.
  static NetSpec policy(int obs_dim, int act_dim);
  /// Value widths: 10*obs, round(sqrt(h1*5)), 5, 1.
  static NetSpec value(int obs_dim);

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

/// Parameter layout and the math of one network. Parameters live in a flat
/// vector owned by the caller so optimizers and checkpoints see one block.
///
/// GRU step (reset gate applied to the hidden state before the candidate):
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   n  = tanh(Wn x + Un (r * h) + bn)
///   h' = (1 - z) * n + z * h
class GruNet {
 public:
  explicit GruNet(const NetSpec& spec);

  const NetSpec& spec() const { return spec_; }
  int num_params() const { return size_; }

  struct StepCache {
    VecX obs, x1, h_prev, z, r, n, h, x3;
  };

  struct SequenceCache {
    std::vector<StepCache> steps;
  };

  /// Single step for inference. Advances `hidden` in place.
  VecX step(ParamsRef params, const VecX& obs, VecX& hidden) const;

  /// Runs a sequence (obs_dim x T) from `h0`; returns outputs (out_dim x T).
  /// When `cache` is non-null it receives everything backward() needs.
  MatX forward(ParamsRef params, const MatX& obs, const VecX& h0,
               SequenceCache* cache = nullptr) const;

  /// Exact reverse-mode gradient through the whole sequence. `d_out` is the
  /// loss gradient at each output (out_dim x T); the result is added to `grad`.
  void backward(ParamsRef params, const SequenceCache& cache, const MatX& d_out,
                GradRef grad) const;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void init(GradRef params, Rng& rng) const;

  // Offsets of each block in the flat parameter vector (column-major).
  struct Layout {
    int w1, b1;
    int wz, wr, wn, uz, ur, un, bz, br, bn;
    int w3, b3, w4, b4;
  };
  const Layout& layout() const { return layout_; }

 private:
  StepCache run_step(ParamsRef params, const VecX& obs, const VecX& h_prev) const;

  NetSpec spec_;
  Layout layout_{};
  int size_ = 0;
};

/// Diagonal Gaussian over actions with a state-independent log-std.
struct DiagGaussian {
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 1.0;

  static double clamp_log_std(double s);
  static double log_prob(const VecX& action, const VecX& mean, const VecX& log_std);
  static double entropy(const VecX& log_std);
  /// KL(old || new) for diagonal Gaussians.
  static double kl(const VecX& mean_old, const VecX& log_std_old, const VecX& mean_new,
                   const VecX& log_std_new);
};

/// Weights of both networks and the policy log-std.
/// `policy` holds the policy network parameters followed by act_dim log-std
/// entries; `value` holds the value network parameters.
struct PolicyParams {
  NetSpec policy_spec;
  NetSpec value_spec;
  VecX policy;
  VecX value;

  int policy_net_size() const;
  Eigen::VectorBlock<const VecX> log_std() const;
  VecX clamped_log_std() const;
};

/// Fresh parameters; log-std starts at log(1) = 0.
PolicyParams init_params(const NetSpec& policy_spec, const NetSpec& value_spec, Rng& rng);

struct PolicyOutput {
  VecX mean;
  VecX log_std;
};

/// One policy step: returns the action mean and log-std and advances `hidden`.
PolicyOutput policy_forward(const PolicyParams& p, const VecX& obs, VecX& hidden);

/// One value step: returns V and advances `hidden`.
double value_forward(const PolicyParams& p, const VecX& obs, VecX& hidden);

}  // namespace losc
