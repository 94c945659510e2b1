#include <iostream>
#include <string>
#include <vector>

#include "kdveq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kdveq::cli::dispatch(args, std::cout, std::cerr);
}
