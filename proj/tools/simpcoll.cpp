#include <iostream>
#include <string>
#include <vector>

#include "simpcoll/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return simpcoll::cli::run(args, std::cout);
}
