#include <iostream>
#include <string>
#include <vector>

#include "dlau/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dlau::execute_command(args, std::cout, std::cerr);
}
