#include <iostream>

#include "weierdim/cli.hpp"

int main(int argc, char** argv) { return weierdim::cli::run(argc, argv, std::cout, std::cerr); }
