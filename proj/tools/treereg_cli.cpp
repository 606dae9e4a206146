#include <iostream>

#include "treereg/cli.hpp"

int main(int argc, char** argv) { return treereg::cli::run(argc, argv, std::cout, std::cerr); }
