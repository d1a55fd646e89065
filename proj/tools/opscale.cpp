#include <iostream>
#include <string>
#include <vector>

#include "opscale/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return opscale::cli::run(args, std::cout, std::cerr);
}
