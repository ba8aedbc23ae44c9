#include <iostream>

#include "kk/cli.hpp"

int main(int argc, char** argv) { return kk::cli::run(argc, argv, std::cout, std::cerr); }
