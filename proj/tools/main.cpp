#include <iostream>

#include "pupilshape/cli.hpp"

int main(int argc, char** argv) { return pupilshape::cli::run(argc, argv, std::cout, std::cerr); }
