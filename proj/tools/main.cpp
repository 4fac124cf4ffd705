#include <iostream>

#include "rvpipe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rvpipe::run_cli(args, std::cin, std::cout, std::cerr);
}
