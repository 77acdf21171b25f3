#include <iostream>

#include "bdparse/cli.hpp"

int main(int argc, char** argv) { return bdparse::cli::run(argc, argv, std::cout, std::cerr); }
