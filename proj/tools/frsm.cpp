#include <iostream>
#include <string>
#include <vector>

#include "frsm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return frsm::cli_main(args, std::cout, std::cerr);
}
