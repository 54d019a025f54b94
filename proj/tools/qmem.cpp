#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qmem/errors.hpp"
#include "qmem/kernels.hpp"
#include "qmem/pipelines.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

void apply_thread_env() {
  const char* env = std::getenv("QMEM_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw qmem::ValidationError(std::string("QMEM_THREADS must be a positive integer, got \"") + env + "\"");
  }
  qmem::set_thread_count(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeeman-degenerate EIT quantum memory toolkit"};
  app.set_version_flag("--version", QMEM_VERSION);
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    bool verbose = false;
  };
  std::map<std::string, Options> opts;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help{
      {"spectrum", "Transmission spectra with and without control"},
      {"store", "Pulse propagation: slow light, short and long storage"},
      {"larmor", "Larmor collapse of g_si and the field fit"},
      {"counting", "Photon-counting statistics sweeps"},
      {"figures", "Run every configured pipeline and write a manifest"}};
  for (const auto& [name, text] : help) {
    Options& o = opts[name];
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Override the counting seed");
    if (name == "counting") sub->add_option("--trials", o.trials, "Override Monte Carlo trials");
    sub->add_flag("-v,--verbose", o.verbose, "Progress on stderr");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    apply_thread_env();
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      const Options& o = opts[name];
      qmem::RunContext ctx = qmem::RunContext::from_file(o.config);
      ctx.verbose = o.verbose;
      if (sub->count("--seed")) ctx.seed_override = o.seed;
      if (sub->get_option_no_throw("--trials") && sub->count("--trials")) ctx.trials_override = o.trials;
      ctx.effective_config().validate();
      if (name == "figures") {
        for (const auto& w : qmem::cmd_figures(ctx, o.out)) {
          for (const auto& f : w.files) std::cout << f.string() << "\n";
        }
        std::cout << (std::filesystem::path(o.out) / "manifest.json").string() << "\n";
      } else {
        for (const auto& f : qmem::run_pipeline(ctx, name, o.out).files) std::cout << f.string() << "\n";
      }
    }
  } catch (const qmem::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qmem::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
