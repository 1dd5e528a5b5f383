#include <iostream>

#include "kellylab/cli.hpp"

int main(int argc, char** argv) { return kellylab::cli::run(argc, argv, std::cout, std::cerr); }
