#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floquetlab/cli/commands.hpp"
#include "floquetlab/cli/output.hpp"
#include "floquetlab/cli/pool.hpp"
#include "floquetlab/cli/run_config.hpp"
#include "floquetlab/error.hpp"

namespace fc = floquetlab::cli;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::vector<std::string> overrides;
  bool print_config = false;
};

fc::RunConfig assemble(const std::string& name, const CommonFlags& f) {
  fc::RunConfig cfg;
  if (!f.config_path.empty()) {
    cfg = fc::RunConfig::load(f.config_path);
    if (!cfg.subcommand.empty() && cfg.subcommand != name)
      throw floquetlab::ConfigError("config file is for '" + cfg.subcommand + "', not '" + name + "'");
  }
  cfg.subcommand = name;
  for (const auto& a : f.overrides) cfg.set(a);
  if (f.seed) cfg.seed = *f.seed;
  if (f.format) cfg.format = *f.format;
  cfg.out_dir = f.out_dir;
  return cfg;
}

int run(const std::string& name, const CommonFlags& f) {
  try {
    const fc::RunConfig cfg = assemble(name, f);
    fc::validate(cfg);
    if (f.print_config) {
      std::cout << cfg.to_text();
      return fc::kExitOk;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto artifacts = fc::run_command(cfg, f.threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fc::write_run(cfg.out_dir, artifacts, cfg.to_text(), seconds);
    for (const auto& a : artifacts) std::cout << cfg.out_dir << "/" << a.filename << "\n";
    std::cout << cfg.out_dir << "/manifest.json\n";
    return fc::kExitOk;
  } catch (...) {
    std::string message;
    const int code = fc::exit_code_for_current_exception(message);
    std::cerr << "floquetlab " << name << ": " << message << "\n";
    return code;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet and kicked-system numerical lab"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string format;
  for (const auto& name : fc::subcommands()) {
    std::string help = "keys:";
    for (const auto& [k, v] : fc::subcommand_keys(name)) help += " " + k + (v.empty() ? "" : "=" + v);
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_option("--threads", flags.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", flags.seed, "RNG seed");
    sub->add_option("--format", flags.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-p,--set", flags.overrides, "key=value override, repeatable");
    sub->add_flag("--print-config", flags.print_config, "print the resolved config and exit");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fc::kExitConfig;
  }
  return run(app.get_subcommands().front()->get_name(), flags);
}
