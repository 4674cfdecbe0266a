#include <iostream>

#include "quickar/cli.hpp"

int main(int argc, char** argv) {
  return quickar::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
