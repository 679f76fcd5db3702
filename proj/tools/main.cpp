#include <iostream>

#include "todaq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return todaq::cli::run(args, std::cout, std::cerr);
}
