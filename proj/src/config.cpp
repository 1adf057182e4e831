#include "losc/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace losc {

namespace {

// Enumerates every config field once with its dotted path. The same list
// drives encoding, decoding and unknown-key detection.
template <typename Visitor>
void visit_fields(Visitor& v, Config& c) {
  ScenarioConfig& s = c.scenario;
  v("seed", c.seed);
  v("episodes", c.episodes);
  v("checkpoint", c.checkpoint);

  v("scenario.range_m", s.range_m);
  v("scenario.elevation_deg", s.elevation_deg);
  v("scenario.azimuth_deg", s.azimuth_deg);
  v("scenario.missile_speed", s.missile_speed);
  v("scenario.target_speed", s.target_speed);
  v("scenario.target_cone_half_apex_deg", s.target_cone_half_apex_deg);
  v("scenario.heading_error_deg", s.heading_error_deg);
  v("scenario.target_max_accel_g", s.target_max_accel_g);
  v("scenario.missile_altitude_m", s.missile_altitude_m);
  v("scenario.max_resample", s.max_resample);

  v("scenario.seeker.radome_enabled", s.radome_enabled);
  v("scenario.seeker.radome_amplitude", s.radome_amplitude);
  v("scenario.seeker.radome_k", s.radome_k);
  v("scenario.seeker.sigma_los", s.sigma_los);
  v("scenario.seeker.lag_tau", s.seeker_lag_tau);

  v("scenario.target_drag.mode", s.target_drag);
  v("scenario.target_drag.k", s.target_k);
  v("scenario.target_drag.cd0", s.target_cd0);
  v("scenario.target_drag.mass", s.target_mass);

  v("scenario.missile_drag.k", s.missile.k);
  v("scenario.missile_drag.mass", s.missile.mass);
  v("scenario.missile_drag.cd0", s.missile.cd0);
  v("scenario.missile_drag.s_ref", s.missile.s_ref);

  v("scenario.maneuver.bang_bang_duration", s.maneuver.bang_bang_duration);
  v("scenario.maneuver.initiation_time", s.maneuver.initiation_time);
  v("scenario.maneuver.weave_period", s.maneuver.weave_period);
  v("scenario.maneuver.jink_interval", s.maneuver.jink_interval);
  v("scenario.maneuver.p_max_accel", s.maneuver.p_max_accel);
  v("scenario.maneuver.long_weave", s.maneuver.long_weave);
  v("scenario.maneuver.p_long_weave", s.maneuver.p_long_weave);
  v("scenario.maneuver.horizon", s.maneuver.horizon);

  v("scenario.guidance.law", s.guidance.law);
  v("scenario.guidance.nav_constant", s.guidance.nav_constant);
  v("scenario.guidance.curvature_scale", s.guidance.curvature_scale);
  v("scenario.guidance.accel_ref", s.guidance.accel_ref);
  v("scenario.guidance.accel_max", s.guidance.accel_max);
  v("scenario.guidance.fcs_tau", s.guidance.fcs_tau);
  v("scenario.guidance.actuator_tau", s.guidance.actuator_tau);
  v("scenario.guidance.perp_frame", s.guidance.perp_frame);

  v("scenario.integration.guidance_dt", s.integration.guidance_dt);
  v("scenario.integration.fine_dt", s.integration.fine_dt);
  v("scenario.integration.fine_range", s.integration.fine_range);
  v("scenario.integration.time_cap", s.integration.time_cap);
  v("scenario.integration.fine_everywhere", s.integration.fine_everywhere);

  v("scenario.reward.alpha", s.reward.alpha);
  v("scenario.reward.beta", s.reward.beta);
  v("scenario.reward.r_lim", s.reward.r_lim);
  v("scenario.reward.epsilon", s.reward.epsilon);
  v("scenario.reward.sigma", s.reward.sigma);
  v("scenario.reward.gamma_shaping", s.reward.gamma_shaping);
  v("scenario.reward.gamma_terminal", s.reward.gamma_terminal);

  TrainerConfig& t = c.trainer;
  v("trainer.clip_init", t.clip_init);
  v("trainer.kl_target", t.kl_target);
  v("trainer.lr_value", t.lr_value);
  v("trainer.lr_policy", t.lr_policy);
  v("trainer.epochs", t.epochs);
  v("trainer.episodes_per_rollout", t.episodes_per_rollout);
  v("trainer.total_episodes", t.total_episodes);
  v("trainer.early_stop_factor", t.early_stop_factor);
  v("trainer.entropy_coef", t.entropy_coef);
  v("trainer.obs_clip", t.obs_clip);
  v("trainer.checkpoint_every", t.checkpoint_every);
  v("trainer.servo.lr_decrease", t.servo.lr_decrease);
  v("trainer.servo.clip_decrease", t.servo.clip_decrease);
  v("trainer.servo.increase", t.servo.increase);
  v("trainer.servo.clip_min", t.servo.clip_min);
  v("trainer.servo.clip_max", t.servo.clip_max);
  v("trainer.servo.lr_min", t.servo.lr_min);
  v("trainer.servo.lr_max", t.servo.lr_max);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  return parts;
}

// Follows `path` from `root`; returns an invalid (zombie) node when absent.
YAML::Node find(const YAML::Node& root, const std::string& path) {
  YAML::Node cur = YAML::Clone(root);
  for (const auto& key : split_path(path)) {
    if (!cur.IsMap() || !cur[key]) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node next = cur[key];
    cur.reset(next);
  }
  return cur;
}

void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t i,
              const YAML::Node& value) {
  if (i + 1 == parts.size()) {
    node[parts[i]] = value;
    return;
  }
  YAML::Node child = node[parts[i]];
  if (!child.IsMap()) child = YAML::Node(YAML::NodeType::Map);
  set_path(child, parts, i + 1, value);
  node[parts[i]] = child;
}

// --- encoding -----------------------------------------------------------

YAML::Node encode(double x) { return YAML::Node(x); }
YAML::Node encode(int x) { return YAML::Node(x); }
YAML::Node encode(long long x) { return YAML::Node(x); }
YAML::Node encode(std::uint64_t x) { return YAML::Node(x); }
YAML::Node encode(bool x) { return YAML::Node(x); }
YAML::Node encode(const std::string& x) { return YAML::Node(x); }
YAML::Node encode(GuidanceLaw x) { return YAML::Node(std::string(to_string(x))); }
YAML::Node encode(PerpFrame x) { return YAML::Node(std::string(to_string(x))); }
YAML::Node encode(TargetDragMode x) { return YAML::Node(std::string(to_string(x))); }
YAML::Node encode(const Interval& x) {
  YAML::Node n(YAML::NodeType::Sequence);
  n.push_back(x.min);
  n.push_back(x.max);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

struct Encoder {
  YAML::Node root{YAML::NodeType::Map};
  template <typename T>
  void operator()(const std::string& path, const T& value) {
    set_path(root, split_path(path), 0, encode(value));
  }
};

// --- decoding -----------------------------------------------------------

template <typename T>
T scalar(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw Error(ErrorCode::kConfig, path + ": expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::kConfig, path + ": cannot parse '" + n.Scalar() + "'");
  }
}

void decode(const YAML::Node& n, const std::string& p, double& x) { x = scalar<double>(n, p); }
void decode(const YAML::Node& n, const std::string& p, int& x) { x = scalar<int>(n, p); }
void decode(const YAML::Node& n, const std::string& p, long long& x) {
  x = scalar<long long>(n, p);
}
void decode(const YAML::Node& n, const std::string& p, std::uint64_t& x) {
  x = scalar<std::uint64_t>(n, p);
}
void decode(const YAML::Node& n, const std::string& p, bool& x) { x = scalar<bool>(n, p); }
void decode(const YAML::Node& n, const std::string& p, std::string& x) {
  x = n.IsNull() ? std::string() : scalar<std::string>(n, p);
}
void decode(const YAML::Node& n, const std::string& p, GuidanceLaw& x) {
  x = parse_law(scalar<std::string>(n, p));
}
void decode(const YAML::Node& n, const std::string& p, PerpFrame& x) {
  x = parse_perp_frame(scalar<std::string>(n, p));
}
void decode(const YAML::Node& n, const std::string& p, TargetDragMode& x) {
  x = parse_drag_mode(scalar<std::string>(n, p));
}
void decode(const YAML::Node& n, const std::string& p, Interval& x) {
  if (n.IsSequence() && n.size() == 2) {
    x = {scalar<double>(n[0], p), scalar<double>(n[1], p)};
  } else if (n.IsScalar()) {
    const double v = scalar<double>(n, p);
    x = {v, v};
  } else {
    throw Error(ErrorCode::kConfig, p + ": expected [min, max] or a single number");
  }
}

struct Decoder {
  const YAML::Node& root;
  std::set<std::string> known;
  template <typename T>
  void operator()(const std::string& path, T& value) {
    known.insert(path);
    const YAML::Node n = find(root, path);
    if (n.IsDefined()) decode(n, path, value);
  }
};

void check_unknown(const YAML::Node& node, const std::string& prefix,
                   const std::set<std::string>& known) {
  if (!node.IsMap()) {
    if (!known.count(prefix)) throw Error(ErrorCode::kConfig, "unknown config key '" + prefix + "'");
    return;
  }
  if (known.count(prefix)) throw Error(ErrorCode::kConfig, prefix + ": expected a value");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    check_unknown(kv.second, prefix.empty() ? key : prefix + "." + key, known);
  }
}

Config decode_root(const YAML::Node& root) {
  Config cfg;
  if (root.IsNull() || !root.IsDefined()) return cfg;
  if (!root.IsMap()) throw Error(ErrorCode::kConfig, "config root must be a mapping");
  Decoder d{root, {}};
  visit_fields(d, cfg);
  check_unknown(root, "", d.known);
  cfg.scenario.validate();
  return cfg;
}

YAML::Node parse_yaml(const std::string& text, const std::string& what) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, what + ": " + e.what());
  }
}

}  // namespace

Config parse_config(const std::string& yaml_text) {
  return decode_root(parse_yaml(yaml_text, "config"));
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void apply_overrides(Config& cfg, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return;
  Encoder enc;
  visit_fields(enc, cfg);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kConfig, "override '" + o + "' is not key=value");
    }
    const std::string key = o.substr(0, eq);
    set_path(enc.root, split_path(key), 0, parse_yaml(o.substr(eq + 1), key));
  }
  cfg = decode_root(enc.root);
}

std::string dump_config(const Config& cfg) {
  Encoder enc;
  visit_fields(enc, const_cast<Config&>(cfg));
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << enc.root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace losc
