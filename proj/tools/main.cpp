#include <iostream>

#include "beamspace/cli.hpp"

int main(int argc, char** argv) { return beamspace::cli::run(argc, argv, std::cout, std::cerr); }
