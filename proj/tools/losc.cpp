// Command-line front end. Talks to the library only through losc.h.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "losc/losc.h"

namespace {

struct Failure {
  int status;
};

void check(losc_status st) {
  if (st != LOSC_OK) {
    std::cerr << "error: " << losc_status_string(st) << ": " << losc_last_error() << '\n';
    throw Failure{static_cast<int>(st)};
  }
}

// Single-quoted YAML scalar so paths survive the key=value parser.
std::string yaml_quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "YAML config file (defaults if omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", c.overrides, "Override, dotted.key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "Master seed");
}

using ConfigPtr = std::unique_ptr<losc_config, decltype(&losc_config_free)>;

ConfigPtr make_config(const Common& c, const std::vector<std::string>& extra) {
  losc_config* raw = nullptr;
  check(c.config_path.empty() ? losc_config_new(&raw) : losc_config_load(c.config_path.c_str(), &raw));
  ConfigPtr cfg(raw, &losc_config_free);
  for (const auto& o : c.overrides) check(losc_config_set(cfg.get(), o.c_str()));
  for (const auto& o : extra) check(losc_config_set(cfg.get(), o.c_str()));
  if (!c.seed.empty()) check(losc_config_set(cfg.get(), ("seed=" + c.seed).c_str()));
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    throw Failure{LOSC_ERR_IO};
  }
}

void print_row(const losc_history_row* r, void*) {
  std::printf("update %4d  episodes %7lld  reward %9.3f  hit %5.3f  kl %.2e  clip %.3f  lr %.2e\n",
              r->update, r->episodes, r->reward_mean, r->hit_rate, r->kl, r->clip, r->lr_policy);
  std::fflush(stdout);
}

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("%s %-36s %s\n", passed ? "PASS" : "FAIL", name, detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missile-target engagement lab: guidance benchmarks and LOS-curvature training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(losc_version()));

  Common common;
  std::string law, checkpoint, out, resume;
  long long episodes = 0;
  int count = 1;

  CLI::App* train = app.add_subcommand("train", "Train the LOS-curvature policy");
  add_common(train, common);
  train->add_option("--episodes", episodes, "Total training episodes");
  train->add_option("-o,--out", out, "Output directory for checkpoint and history")
      ->default_val("run");
  train->add_option("--resume", resume, "Checkpoint to resume from")->check(CLI::ExistingFile);

  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo miss-distance benchmark");
  add_common(bench, common);
  bench->add_option("--law", law, "pn | apn | pn-losc");
  bench->add_option("--episodes", episodes, "Number of episodes");
  bench->add_option("--checkpoint", checkpoint, "Policy checkpoint (pn-losc)");
  bench->add_option("-o,--out", out, "Output directory for the stats files")->default_val("bench");

  CLI::App* trace = app.add_subcommand("trace", "Export per-step trajectories");
  add_common(trace, common);
  trace->add_option("--law", law, "pn | apn | pn-losc");
  trace->add_option("--checkpoint", checkpoint, "Policy checkpoint (pn-losc)");
  trace->add_option("--count", count, "Episodes to export (seeds seed, seed+1, ...)")
      ->check(CLI::PositiveNumber);
  trace->add_option("-o,--out", out, "Output directory")->default_val("traces");

  CLI::App* selfcheck = app.add_subcommand("check", "Run the invariant and oracle suite");

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 2;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> extra;
    if (!law.empty()) extra.push_back("scenario.guidance.law=" + law);
    if (!checkpoint.empty()) extra.push_back("checkpoint=" + yaml_quoted(checkpoint));

    if (*train) {
      if (episodes > 0) extra.push_back("trainer.total_episodes=" + std::to_string(episodes));
      const ConfigPtr cfg = make_config(common, extra);
      check(losc_train(cfg.get(), out.c_str(), resume.empty() ? nullptr : resume.c_str(),
                       print_row, nullptr));
      std::cout << "wrote " << out << "/checkpoint.json and " << out << "/history.txt\n";
    } else if (*bench) {
      if (episodes > 0) extra.push_back("episodes=" + std::to_string(episodes));
      const ConfigPtr cfg = make_config(common, extra);
      losc_bench* raw = nullptr;
      check(losc_bench_run(cfg.get(), &raw));
      std::unique_ptr<losc_bench, decltype(&losc_bench_free)> result(raw, &losc_bench_free);
      std::filesystem::create_directories(out);
      write_file(std::filesystem::path(out) / "stats.txt", losc_bench_report(result.get()));
      write_file(std::filesystem::path(out) / "stats.json",
                 std::string(losc_bench_json(result.get())) + "\n");
      std::cout << losc_bench_report(result.get());
    } else if (*trace) {
      const ConfigPtr cfg = make_config(common, extra);
      std::uint64_t seed = 0;
      check(losc_config_seed(cfg.get(), &seed));
      std::filesystem::create_directories(out);
      for (int i = 0; i < count; ++i) {
        const auto path = std::filesystem::path(out) / ("trace_" + std::to_string(seed + i) + ".txt");
        double miss = 0.0;
        check(losc_trace_export(cfg.get(), seed + i, path.string().c_str(), &miss));
        std::cout << path.string() << "  miss " << miss << " m\n";
      }
    } else if (*selfcheck) {
      int failures = 0;
      check(losc_check(print_check, nullptr, &failures));
      return failures == 0 ? 0 : 1;
    }
  } catch (const Failure& f) {
    return f.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
