#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return invlab::cli::run(args, std::cout, std::cerr);
}
