#include <iostream>

#include "treebench/cli.hpp"

int main(int argc, char** argv) { return treebench::cli::run(argc, argv, std::cout, std::cerr); }
