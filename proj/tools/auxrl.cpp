#include <iostream>

#include "auxrl/cli/cli.hpp"

int main(int argc, char** argv) { return auxrl::cli::main(argc, argv, std::cout, std::cerr); }
