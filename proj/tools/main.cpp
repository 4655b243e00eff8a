#include <iostream>

#include "cli.hpp"
#include "nfv/error.hpp"

int main(int argc, char** argv) {
  std::optional<nfv::cli::RunConfig> config;
  try {
    config = nfv::cli::parse_config(argc, argv, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "nfv: " << e.what() << "\n";
    return nfv::cli::exit_usage;
  }
  if (!config) {
    return nfv::cli::exit_ok;
  }
  return nfv::cli::execute(*config, std::cout);
}
