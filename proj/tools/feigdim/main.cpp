#include <iostream>

#include "feigdim/cli.hpp"

int main(int argc, char** argv) { return feigdim::cli::run(argc, argv, std::cout, std::cerr); }
