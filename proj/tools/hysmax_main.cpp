#include <iostream>

#include "hysmax/cli.hpp"

int main(int argc, char** argv) { return hysmax::cli::run(argc, argv, std::cout, std::cerr); }
