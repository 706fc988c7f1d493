#include <iostream>

#include "posmon/cli.hpp"

int main(int argc, char** argv) {
  return posmon::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
