#include <iostream>

#include "crsm_tools/cli.hpp"

int main(int argc, char** argv) { return crsm::cli::run(argc, argv, std::cout, std::cerr); }
