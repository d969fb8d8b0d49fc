#include <iostream>

#include "repqed/figures.hpp"

int main(int argc, char** argv) {
  return repqed::cli::run_main(argc, argv, std::cout, std::cerr);
}
