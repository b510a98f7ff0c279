// itwf: runs the experiment presets and writes CSV tables and images.
//
//   itwf <preset> [--config FILE] [--seed N] [--out DIR] [--scale desk|paper] [--threads N]
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "itwf/errors.hpp"
#include "itwf/harness.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out = "out";
  std::string scale = "desk";
};

int run(itwf::Preset preset, Options const &opt) {
  itwf::ExperimentSpec spec = itwf::default_spec(preset, itwf::parse_scale(opt.scale));
  itwf::KeyValueConfig config;
  if (!opt.config.empty()) { config = itwf::KeyValueConfig::load(opt.config); }
  itwf::apply_config(spec, std::move(config));
  if (opt.seed) { spec.seed = *opt.seed; }
  if (opt.threads) { spec.threads = *opt.threads; }

  auto const output = itwf::run_preset(spec);
  itwf::write_output(output, opt.out);
  std::cout << output.summary;
  for (auto const &[file, _] : output.tables) { std::cout << "wrote " << (std::filesystem::path(opt.out) / file).string() << "\n"; }
  for (auto const &[file, _] : output.images) { std::cout << "wrote " << (std::filesystem::path(opt.out) / file).string() << "\n"; }
  return 0;
}

char const *describe(itwf::Preset preset) {
  switch (preset) {
  case itwf::Preset::SuccessRateSweep: return "success rate against m/n, real Gaussian model";
  case itwf::Preset::ConvergenceCurve: return "relative error per pass, real Gaussian model";
  case itwf::Preset::CdpImage: return "image recovery from coded diffraction patterns";
  case itwf::Preset::NoisySnrSweep: return "relative MSE against SNR under Poisson noise";
  }
  return "";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Truncated Wirtinger flow and its incremental variant: experiment presets"};
  app.footer("\n" + itwf::config_help());
  app.require_subcommand(1);

  Options opt;
  std::optional<itwf::Preset> chosen;
  for (auto preset : {itwf::Preset::SuccessRateSweep, itwf::Preset::ConvergenceCurve, itwf::Preset::CdpImage,
                      itwf::Preset::NoisySnrSweep}) {
    auto *sub = app.add_subcommand(itwf::preset_name(preset), describe(preset));
    sub->add_option("--config", opt.config, "key = value config file");
    sub->add_option("--seed", opt.seed, "master seed (overrides the config)");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--scale", opt.scale, "desk or paper problem sizes")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
    sub->callback([&chosen, preset] { chosen = preset; });
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const &e) {
    return app.exit(e);
  } catch (CLI::ParseError const &e) {
    app.exit(e);
    return 1;
  }

  try {
    return run(*chosen, opt);
  } catch (itwf::ConfigError const &e) {
    std::cerr << "itwf: " << e.what() << "\n";
    return 1;
  } catch (itwf::IoError const &e) {
    std::cerr << "itwf: " << e.what() << "\n";
    return 2;
  } catch (std::exception const &e) {
    std::cerr << "itwf: " << e.what() << "\n";
    return 1;
  }
}
