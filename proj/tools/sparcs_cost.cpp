#include <iostream>
#include <string>
#include <vector>

#include "sparcs/pipeline/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sparcs::pipeline::run_cli(args, std::cout, std::cerr);
}
