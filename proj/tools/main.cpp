#include <iostream>

#include "formspace/cli.hpp"

int main(int argc, char** argv) { return formspace::cli::run(argc, argv, std::cout, std::cerr); }
