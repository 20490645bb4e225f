// cogrowth_lab: command-line front end to the experiment runner.
//
//   cogrowth_lab [--seed N] [--workers N] [--out PATH] [--format csv|json] drift k=2 n=1000
//   cogrowth_lab run config.ini [key=value ...]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cogrowth/config.hpp"
#include "cogrowth/errors.hpp"
#include "cogrowth/runner.hpp"

namespace {

using cogrowth::ExperimentConfig;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stream;
  int workers = 1;
  std::string out;
  std::string format;
  std::string config;
  bool dry_run = false;
};

void apply_pairs(ExperimentConfig& c, const std::vector<std::string>& pairs) {
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw cogrowth::PreconditionError("argument '" + kv + "': expected key=value");
    }
    c.apply(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw cogrowth::PreconditionError("out: cannot write " + path);
  f << text;
}

int execute(ExperimentConfig c, const Globals& g) {
  if (g.seed) c.seed = *g.seed;
  if (g.stream) c.stream = *g.stream;
  if (!g.format.empty()) c.apply("format", g.format);
  if (!g.out.empty()) c.out = g.out;
  if (g.dry_run) {
    cogrowth::validate(c);
    std::cout << cogrowth::serialize(c.with_defaults());
    return 0;
  }
  cogrowth::RunOptions opts;
  opts.workers = g.workers;
  if (!c.out.empty()) {
    opts.on_progress = [&](const cogrowth::RunReport& partial) {
      cogrowth::RunReport snapshot = partial;
      snapshot.status = "running";
      write_text(c.out, cogrowth::render(snapshot));
    };
  }
  const auto report = cogrowth::run(c, opts);
  write_text(c.out, cogrowth::render(report));
  if (report.exit_code != 0) std::cerr << "cogrowth_lab: " << report.status << ": " << report.message << "\n";
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks, critical exponents and confinement on free groups"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--stream", g.stream, "stream id under the seed");
  app.add_option("--workers", g.workers, "worker threads (results do not depend on it)")->check(CLI::Range(1, 256));
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config, "base config file; key=value arguments override it");
  app.add_flag("--dry-run", g.dry_run, "validate and print the canonical config");

  std::vector<std::string> run_args;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
  run_cmd->add_option("args", run_args, "config path followed by key=value overrides")->required();
  run_cmd->fallthrough();

  app.add_subcommand("list", "list experiments and their parameters")->fallthrough();

  struct Sub {
    CLI::App* cmd;
    std::string name;
    std::vector<std::string> args;
  };
  std::vector<Sub> subs;
  subs.reserve(cogrowth::experiment_schemas().size());
  for (const auto& s : cogrowth::experiment_schemas()) {
    subs.push_back({app.add_subcommand(s.name, s.summary), s.name, {}});
    subs.back().cmd->add_option("params", subs.back().args, "key=value parameters");
    subs.back().cmd->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& s : cogrowth::experiment_schemas()) {
        std::cout << s.name << ": " << s.summary << "\n";
        for (const auto& p : s.params) {
          std::cout << "  " << p.name << " = " << p.default_value << "  (" << p.help << ")\n";
        }
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      ExperimentConfig c = cogrowth::load_config(run_args.front());
      apply_pairs(c, std::vector<std::string>(run_args.begin() + 1, run_args.end()));
      return execute(std::move(c), g);
    }
    for (auto& s : subs) {
      if (!s.cmd->parsed()) continue;
      ExperimentConfig c;
      if (!g.config.empty()) {
        c = cogrowth::load_config(g.config);
        if (c.experiment != s.name) {
          throw cogrowth::PreconditionError("experiment: config is for '" + c.experiment +
                                            "', subcommand is '" + s.name + "'");
        }
      } else {
        c.experiment = s.name;
      }
      apply_pairs(c, s.args);
      return execute(std::move(c), g);
    }
  } catch (const cogrowth::Error& e) {
    std::cerr << "cogrowth_lab: " << e.what() << "\n";
    return cogrowth::exit_code(e.kind());
  }
  return 2;
}
