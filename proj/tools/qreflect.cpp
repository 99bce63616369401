#include <iostream>

#include "qreflect/cli/app.hpp"

int main(int argc, char** argv) {
  return qreflect::cli::run_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
