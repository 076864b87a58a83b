#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evth/mem.hpp"
#include "evth/runner.hpp"

int main(int argc, char** argv) {
  evth::retain_large_allocations();
  CLI::App app{"evth — batch evolution of the vacuum Einstein equations in a "
               "time-harmonic transversal gauge, with breakdown monitors"};
  std::string config_path;
  std::string resume_path;
  app.add_option("config", config_path, "run configuration file")->required();
  app.add_option("--resume", resume_path, "continue from a checkpoint");
  CLI11_PARSE(app, argc, argv);

  evth::RunConfig cfg;
  try {
    cfg = evth::parse_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return evth::kExitConfigError;
  }

  if (resume_path.empty()) return evth::run(cfg, std::cout);
  return evth::resume(resume_path, cfg, std::cout);
}
