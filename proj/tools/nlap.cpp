#include <iostream>

#include "app/run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nlap::app::run(args, std::cout, std::cerr);
}
