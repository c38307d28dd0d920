#include <iostream>

#include "omlab/cli.hpp"

int main(int argc, char** argv) { return omlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
