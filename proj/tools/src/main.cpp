#include <iostream>
#include <string>
#include <vector>

#include "tdapipe/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return tdapipe::run_cli(args, std::cout, std::cerr);
}
