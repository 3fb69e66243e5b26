#include <iostream>

#include "kgbench/cli.hpp"

int main(int argc, char** argv) { return kgbench::cli::run(argc, argv, std::cout, std::cerr); }
