#include "losc/nets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace losc {

namespace {

using ConstMap = Eigen::Map<const MatX>;
using MutMap = Eigen::Map<MatX>;
using ConstVMap = Eigen::Map<const VecX>;
using MutVMap = Eigen::Map<VecX>;

VecX sigmoid(const VecX& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

NetSpec NetSpec::policy(int obs_dim, int act_dim) {
  NetSpec s;
  s.obs_dim = obs_dim;
  s.hidden1 = 10 * obs_dim;
  s.hidden3 = 10 * act_dim;
  s.hidden2 = static_cast<int>(std::lround(std::sqrt(double(s.hidden1) * s.hidden3)));
  s.out_dim = act_dim;
  return s;
}

NetSpec NetSpec::value(int obs_dim) {
  NetSpec s;
  s.obs_dim = obs_dim;
  s.hidden1 = 10 * obs_dim;
  s.hidden3 = 5;
  s.hidden2 = static_cast<int>(std::lround(std::sqrt(double(s.hidden1) * s.hidden3)));
  s.out_dim = 1;
  return s;
}

GruNet::GruNet(const NetSpec& spec) : spec_(spec) {
  if (spec.obs_dim <= 0 || spec.hidden1 <= 0 || spec.hidden2 <= 0 || spec.hidden3 <= 0 ||
      spec.out_dim <= 0) {
    throw Error(ErrorCode::kShapeMismatch, "network widths must be positive");
  }
  const int in = spec.obs_dim, h1 = spec.hidden1, h2 = spec.hidden2, h3 = spec.hidden3,
            out = spec.out_dim;
  int off = 0;
  auto take = [&off](int n) {
    const int at = off;
    off += n;
    return at;
  };
  layout_.w1 = take(h1 * in);
  layout_.b1 = take(h1);
  layout_.wz = take(h2 * h1);
  layout_.wr = take(h2 * h1);
  layout_.wn = take(h2 * h1);
  layout_.uz = take(h2 * h2);
  layout_.ur = take(h2 * h2);
  layout_.un = take(h2 * h2);
  layout_.bz = take(h2);
  layout_.br = take(h2);
  layout_.bn = take(h2);
  layout_.w3 = take(h3 * h2);
  layout_.b3 = take(h3);
  layout_.w4 = take(out * h3);
  layout_.b4 = take(out);
  size_ = off;
}

GruNet::StepCache GruNet::run_step(ParamsRef p, const VecX& obs, const VecX& h_prev) const {
  const int in = spec_.obs_dim, h1 = spec_.hidden1, h2 = spec_.hidden2, h3 = spec_.hidden3;
  const double* d = p.data();
  const Layout& L = layout_;

  StepCache c;
  c.obs = obs;
  c.h_prev = h_prev;
  c.x1 = (ConstMap(d + L.w1, h1, in) * obs + ConstVMap(d + L.b1, h1)).array().tanh().matrix();
  c.z = sigmoid(ConstMap(d + L.wz, h2, h1) * c.x1 + ConstMap(d + L.uz, h2, h2) * h_prev +
                ConstVMap(d + L.bz, h2));
  c.r = sigmoid(ConstMap(d + L.wr, h2, h1) * c.x1 + ConstMap(d + L.ur, h2, h2) * h_prev +
                ConstVMap(d + L.br, h2));
  const VecX gated = c.r.cwiseProduct(h_prev);
  c.n = (ConstMap(d + L.wn, h2, h1) * c.x1 + ConstMap(d + L.un, h2, h2) * gated +
         ConstVMap(d + L.bn, h2))
            .array()
            .tanh()
            .matrix();
  c.h = (1.0 - c.z.array()).matrix().cwiseProduct(c.n) + c.z.cwiseProduct(h_prev);
  c.x3 = (ConstMap(d + L.w3, h3, h2) * c.h + ConstVMap(d + L.b3, h3)).array().tanh().matrix();
  return c;
}

VecX GruNet::step(ParamsRef p, const VecX& obs, VecX& hidden) const {
  if (p.size() < size_ || obs.size() != spec_.obs_dim || hidden.size() != spec_.hidden2) {
    throw Error(ErrorCode::kShapeMismatch, "GruNet::step: input shapes do not match the spec");
  }
  const StepCache c = run_step(p, obs, hidden);
  hidden = c.h;
  return ConstMap(p.data() + layout_.w4, spec_.out_dim, spec_.hidden3) * c.x3 +
         ConstVMap(p.data() + layout_.b4, spec_.out_dim);
}

MatX GruNet::forward(ParamsRef p, const MatX& obs, const VecX& h0, SequenceCache* cache) const {
  if (p.size() < size_ || obs.rows() != spec_.obs_dim || h0.size() != spec_.hidden2) {
    throw Error(ErrorCode::kShapeMismatch,
                "GruNet::forward: expected obs rows " + std::to_string(spec_.obs_dim) +
                    ", got " + std::to_string(obs.rows()));
  }
  const auto steps = obs.cols();
  MatX out(spec_.out_dim, steps);
  const ConstMap w4(p.data() + layout_.w4, spec_.out_dim, spec_.hidden3);
  const ConstVMap b4(p.data() + layout_.b4, spec_.out_dim);
  if (cache != nullptr) {
    cache->steps.clear();
    cache->steps.reserve(static_cast<std::size_t>(steps));
  }
  VecX h = h0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    StepCache c = run_step(p, obs.col(t), h);
    out.col(t) = w4 * c.x3 + b4;
    h = c.h;
    if (cache != nullptr) cache->steps.push_back(std::move(c));
  }
  return out;
}

void GruNet::backward(ParamsRef p, const SequenceCache& cache, const MatX& d_out,
                      GradRef grad) const {
  const int in = spec_.obs_dim, h1 = spec_.hidden1, h2 = spec_.hidden2, h3 = spec_.hidden3,
            out = spec_.out_dim;
  if (cache.steps.empty() || static_cast<Eigen::Index>(cache.steps.size()) != d_out.cols()) {
    throw Error(ErrorCode::kMissingCache,
                "GruNet::backward: no forward cache for this sequence");
  }
  if (d_out.rows() != out || grad.size() < size_) {
    throw Error(ErrorCode::kShapeMismatch, "GruNet::backward: gradient shapes do not match");
  }
  const double* d = p.data();
  double* g = grad.data();
  const Layout& L = layout_;

  const ConstMap w1(d + L.w1, h1, in);
  const ConstMap wz(d + L.wz, h2, h1), wr(d + L.wr, h2, h1), wn(d + L.wn, h2, h1);
  const ConstMap uz(d + L.uz, h2, h2), ur(d + L.ur, h2, h2), un(d + L.un, h2, h2);
  const ConstMap w3(d + L.w3, h3, h2), w4(d + L.w4, out, h3);

  MutMap gw1(g + L.w1, h1, in);
  MutVMap gb1(g + L.b1, h1);
  MutMap gwz(g + L.wz, h2, h1), gwr(g + L.wr, h2, h1), gwn(g + L.wn, h2, h1);
  MutMap guz(g + L.uz, h2, h2), gur(g + L.ur, h2, h2), gun(g + L.un, h2, h2);
  MutVMap gbz(g + L.bz, h2), gbr(g + L.br, h2), gbn(g + L.bn, h2);
  MutMap gw3(g + L.w3, h3, h2);
  MutVMap gb3(g + L.b3, h3);
  MutMap gw4(g + L.w4, out, h3);
  MutVMap gb4(g + L.b4, out);

  VecX dh_next = VecX::Zero(h2);
  for (auto t = static_cast<Eigen::Index>(cache.steps.size()) - 1; t >= 0; --t) {
    const StepCache& c = cache.steps[static_cast<std::size_t>(t)];
    const VecX dy = d_out.col(t);

    gw4.noalias() += dy * c.x3.transpose();
    gb4 += dy;
    const VecX da3 = (w4.transpose() * dy).cwiseProduct((1.0 - c.x3.array().square()).matrix());
    gw3.noalias() += da3 * c.h.transpose();
    gb3 += da3;

    const VecX dh = w3.transpose() * da3 + dh_next;
    const VecX dn = dh.cwiseProduct((1.0 - c.z.array()).matrix());
    const VecX dz = dh.cwiseProduct(c.h_prev - c.n);
    VecX dh_prev = dh.cwiseProduct(c.z);

    const VecX dan = dn.cwiseProduct((1.0 - c.n.array().square()).matrix());
    const VecX gated = c.r.cwiseProduct(c.h_prev);
    gwn.noalias() += dan * c.x1.transpose();
    gun.noalias() += dan * gated.transpose();
    gbn += dan;
    const VecX d_gated = un.transpose() * dan;
    const VecX dr = d_gated.cwiseProduct(c.h_prev);
    dh_prev += d_gated.cwiseProduct(c.r);

    const VecX daz = dz.cwiseProduct(c.z.cwiseProduct((1.0 - c.z.array()).matrix()));
    const VecX dar = dr.cwiseProduct(c.r.cwiseProduct((1.0 - c.r.array()).matrix()));
    gwz.noalias() += daz * c.x1.transpose();
    guz.noalias() += daz * c.h_prev.transpose();
    gbz += daz;
    gwr.noalias() += dar * c.x1.transpose();
    gur.noalias() += dar * c.h_prev.transpose();
    gbr += dar;
    dh_prev.noalias() += uz.transpose() * daz + ur.transpose() * dar;

    const VecX dx1 = wz.transpose() * daz + wr.transpose() * dar + wn.transpose() * dan;
    const VecX da1 = dx1.cwiseProduct((1.0 - c.x1.array().square()).matrix());
    gw1.noalias() += da1 * c.obs.transpose();
    gb1 += da1;

    dh_next = dh_prev;
  }
}

void GruNet::init(GradRef params, Rng& rng) const {
  if (params.size() < size_) throw Error(ErrorCode::kShapeMismatch, "parameter block too small");
  params.head(size_).setZero();
  const int in = spec_.obs_dim, h1 = spec_.hidden1, h2 = spec_.hidden2, h3 = spec_.hidden3,
            out = spec_.out_dim;
  auto fill = [&](int offset, int count, int fan_in) {
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-a, a);
    for (int i = 0; i < count; ++i) params[offset + i] = dist(rng);
  };
  fill(layout_.w1, h1 * in, in);
  fill(layout_.wz, h2 * h1, h1);
  fill(layout_.wr, h2 * h1, h1);
  fill(layout_.wn, h2 * h1, h1);
  fill(layout_.uz, h2 * h2, h2);
  fill(layout_.ur, h2 * h2, h2);
  fill(layout_.un, h2 * h2, h2);
  fill(layout_.w3, h3 * h2, h2);
  fill(layout_.w4, out * h3, h3);
}

double DiagGaussian::clamp_log_std(double s) { return std::clamp(s, kLogStdMin, kLogStdMax); }

double DiagGaussian::log_prob(const VecX& action, const VecX& mean, const VecX& log_std) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - 0.5 * kLog2Pi;
  }
  return lp;
}

double DiagGaussian::entropy(const VecX& log_std) {
  return log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * (kLog2Pi + 1.0);
}

double DiagGaussian::kl(const VecX& mean_old, const VecX& log_std_old, const VecX& mean_new,
                        const VecX& log_std_new) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < mean_old.size(); ++i) {
    const double var_old = std::exp(2.0 * log_std_old[i]);
    const double var_new = std::exp(2.0 * log_std_new[i]);
    const double dm = mean_old[i] - mean_new[i];
    kl += log_std_new[i] - log_std_old[i] + (var_old + dm * dm) / (2.0 * var_new) - 0.5;
  }
  return kl;
}

int PolicyParams::policy_net_size() const {
  return static_cast<int>(policy.size()) - policy_spec.out_dim;
}

Eigen::VectorBlock<const VecX> PolicyParams::log_std() const {
  return policy.tail(policy_spec.out_dim);
}

VecX PolicyParams::clamped_log_std() const {
  return log_std().unaryExpr([](double s) { return DiagGaussian::clamp_log_std(s); });
}

PolicyParams init_params(const NetSpec& policy_spec, const NetSpec& value_spec, Rng& rng) {
  const GruNet pnet(policy_spec);
  const GruNet vnet(value_spec);
  PolicyParams p;
  p.policy_spec = policy_spec;
  p.value_spec = value_spec;
  p.policy = VecX::Zero(pnet.num_params() + policy_spec.out_dim);
  p.value = VecX::Zero(vnet.num_params());
  pnet.init(p.policy, rng);
  vnet.init(p.value, rng);
  return p;
}

PolicyOutput policy_forward(const PolicyParams& p, const VecX& obs, VecX& hidden) {
  const GruNet net(p.policy_spec);
  return {net.step(p.policy, obs, hidden), p.clamped_log_std()};
}

double value_forward(const PolicyParams& p, const VecX& obs, VecX& hidden) {
  const GruNet net(p.value_spec);
  return net.step(p.value, obs, hidden)[0];
}

}  // namespace losc
