#include <iostream>

#include "msmbias/cli.hpp"

int main(int argc, char** argv) { return msmbias::cli::run(argc, argv, std::cout, std::cerr); }
