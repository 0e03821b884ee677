#include <iostream>
#include <string>
#include <vector>

#include "lbsvm/cli.hpp"

int main(int argc, char** argv) {
  return lbsvm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
