#include "losc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "losc/parallel.hpp"
#include "losc/ppo.hpp"
#include "losc/seeds.hpp"

namespace losc {

namespace {

constexpr std::size_t kMaxFailureMessages = 10;

struct EpisodeOutcome {
  bool ok = false;
  std::string error;
  EpisodeResult result;
};

// Builds the action source for one episode. PN-LOSC needs trained weights.
class AgentFactory {
 public:
  AgentFactory(const ScenarioConfig& cfg, const std::string& checkpoint) {
    if (cfg.guidance.law != GuidanceLaw::kPnLosc) return;
    if (checkpoint.empty()) {
      throw Error(ErrorCode::kMissingCheckpoint, "pn-losc requires a checkpoint");
    }
    ckpt_.emplace(load_checkpoint(checkpoint));
  }

  std::unique_ptr<Agent> make() const {
    if (!ckpt_) return std::make_unique<ZeroAgent>();
    return std::make_unique<PolicyAgent>(ckpt_->params, ckpt_->scaler);
  }

 private:
  std::optional<Checkpoint> ckpt_;
};

void moments(const std::vector<EpisodeOutcome>& outcomes,
             std::vector<double> EpisodeResult::*samples, double& mean, double& std_dev,
             double& max) {
  double sum = 0.0, n = 0.0;
  max = 0.0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    for (double a : o.result.*samples) {
      sum += a;
      n += 1.0;
      max = std::max(max, a);
    }
  }
  mean = n > 0.0 ? sum / n : 0.0;
  double var = 0.0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    for (double a : o.result.*samples) var += (a - mean) * (a - mean);
  }
  std_dev = n > 0.0 ? std::sqrt(var / n) : 0.0;
}

}  // namespace

BenchmarkStats run_benchmark(const ScenarioConfig& cfg, const BenchmarkOptions& opts) {
  if (opts.episodes <= 0) throw Error(ErrorCode::kInvalidArgument, "episodes must be > 0");
  cfg.validate();
  const AgentFactory factory(cfg, opts.checkpoint);

  std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(opts.episodes));
  parallel_for(outcomes.size(), [&](std::size_t i) {
    auto agent = factory.make();
    try {
      outcomes[i].result = run_episode(cfg, *agent, derive_seed(opts.seed, seeds::kBench, i));
      outcomes[i].ok = std::isfinite(outcomes[i].result.miss);
      if (!outcomes[i].ok) outcomes[i].error = "non-finite miss distance";
    } catch (const Error& e) {
      outcomes[i].error = e.what();
    }
  });

  BenchmarkStats s;
  s.law = to_string(cfg.guidance.law);
  s.episodes = opts.episodes;
  std::vector<double> misses;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].ok) {
      misses.push_back(outcomes[i].result.miss);
    } else {
      ++s.failures;
      if (s.failure_messages.size() < kMaxFailureMessages) {
        s.failure_messages.push_back("episode " + std::to_string(i) + ": " + outcomes[i].error);
      }
    }
  }
  s.completed = static_cast<int>(misses.size());
  if (!misses.empty()) {
    const double n = static_cast<double>(misses.size());
    for (int k = 0; k < 3; ++k) {
      const auto below = std::count_if(misses.begin(), misses.end(), [&](double m) {
        return m < BenchmarkStats::kThresholds[k];
      });
      s.miss_pct[k] = 100.0 * static_cast<double>(below) / n;
    }
    double sum = 0.0;
    for (double m : misses) sum += m;
    s.miss_mean = sum / n;
    std::vector<double> sorted = misses;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.miss_median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  }
  moments(outcomes, &EpisodeResult::accel_samples, s.accel_mean, s.accel_std, s.accel_max);
  moments(outcomes, &EpisodeResult::target_accel_samples, s.target_accel_mean,
          s.target_accel_std, s.target_accel_max);
  return s;
}

void write_report(std::ostream& os, const BenchmarkStats& s) {
  const auto flags = os.flags();
  os << std::fixed << std::setprecision(1);
  os << std::left << std::setw(9) << "Guidance" << std::right << std::setw(9) << "<100cm"
     << std::setw(9) << "<200cm" << std::setw(9) << "<300cm" << std::setw(11) << "|aM| mean"
     << std::setw(10) << "|aM| std" << std::setw(10) << "|aM| max" << std::setw(11)
     << "|aT| mean" << std::setw(10) << "|aT| std" << std::setw(10) << "|aT| max" << '\n';
  os << std::left << std::setw(9) << s.law << std::right << std::setw(9) << s.miss_pct[0]
     << std::setw(9) << s.miss_pct[1] << std::setw(9) << s.miss_pct[2] << std::setw(11)
     << s.accel_mean << std::setw(10) << s.accel_std << std::setw(10) << s.accel_max
     << std::setw(11) << s.target_accel_mean << std::setw(10) << s.target_accel_std
     << std::setw(10) << s.target_accel_max << '\n';
  os << std::setprecision(3) << "episodes " << s.episodes << ", completed " << s.completed
     << ", failed " << s.failures << ", miss mean " << s.miss_mean << " m, median "
     << s.miss_median << " m (accelerations in m/s^2)\n";
  for (const auto& msg : s.failure_messages) os << "  " << msg << '\n';
  os.flags(flags);
}

std::string summary_json(const BenchmarkStats& s) {
  nlohmann::ordered_json j;
  j["law"] = s.law;
  j["episodes"] = s.episodes;
  j["completed"] = s.completed;
  j["failures"] = s.failures;
  j["miss_pct_lt_100cm"] = s.miss_pct[0];
  j["miss_pct_lt_200cm"] = s.miss_pct[1];
  j["miss_pct_lt_300cm"] = s.miss_pct[2];
  j["miss_mean_m"] = s.miss_mean;
  j["miss_median_m"] = s.miss_median;
  j["accel_mean"] = s.accel_mean;
  j["accel_std"] = s.accel_std;
  j["accel_max"] = s.accel_max;
  j["target_accel_mean"] = s.target_accel_mean;
  j["target_accel_std"] = s.target_accel_std;
  j["target_accel_max"] = s.target_accel_max;
  j["failure_messages"] = s.failure_messages;
  return j.dump(2);
}

EpisodeResult export_trajectory(const ScenarioConfig& cfg, std::uint64_t seed,
                                const std::string& checkpoint, const std::string& path) {
  const AgentFactory factory(cfg, checkpoint);
  auto agent = factory.make();
  std::vector<TraceRow> rows;
  EpisodeResult result = run_episode(cfg, *agent, seed, &rows);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write trace '" + path + "'");
  write_trace(out, rows);
  if (!out) throw Error(ErrorCode::kIo, "failed writing trace '" + path + "'");
  return result;
}

}  // namespace losc
