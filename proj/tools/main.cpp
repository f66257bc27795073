#include <iostream>

#include "sparsereg/cli.hpp"

int main(int argc, char** argv) { return sparsereg::cli::run(argc, argv, std::cout, std::cerr); }
