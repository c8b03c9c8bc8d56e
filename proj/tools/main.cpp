#include <iostream>
#include <string>
#include <vector>

#include "infodemic/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return infodemic::run_cli(args, std::cout, std::cerr);
}
