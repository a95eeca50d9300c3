#include <iostream>

#include "gencdf/cli.hpp"

int main(int argc, char** argv) { return gencdf::cli::run(argc, argv, std::cout, std::cerr); }
