#include <iostream>

#include "confdim/cli.hpp"

int main(int argc, char** argv) {
  confdim::RunConfig config;
  bool help = false;
  std::string help_text;
  try {
    config = confdim::parse_args(argc, argv, &help, &help_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return confdim::kExitError;
  }
  if (help) {
    std::cout << help_text;
    return confdim::kExitOk;
  }
  return confdim::run(config, std::cout, std::cerr);
}
