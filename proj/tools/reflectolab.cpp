#include <iostream>
#include <string>
#include <vector>

#include "reflectolab/run_config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return reflectolab::run_main(args, std::cout, std::cerr);
}
