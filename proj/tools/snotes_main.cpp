#include <iostream>
#include <string>
#include <vector>

#include "snotes/cli_reports.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return snotes::run_cli(args, std::cout, std::cerr);
}
