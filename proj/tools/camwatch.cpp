#include <iostream>
#include <string>
#include <vector>

#include "camwatch/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return camwatch::run_subcommand(args, std::cout, std::cerr);
}
