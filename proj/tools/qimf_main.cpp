#include <iostream>

#include "qimf/cli.hpp"

int main(int argc, char** argv) { return qimf::cli::run(argc, argv, std::cout, std::cerr); }
