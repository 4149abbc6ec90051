#include <iostream>
#include <string>
#include <vector>

#include "tcqkd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tcqkd::run_cli(args, std::cout, std::cerr);
}
