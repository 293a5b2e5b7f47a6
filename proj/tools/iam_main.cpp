#include <iostream>

#include "iam/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return iam::cli::run(args, std::cout, std::cerr);
}
