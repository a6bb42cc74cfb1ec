#include <iostream>

#include "corrpost/cli.hpp"

int main(int argc, char** argv) { return corrpost::cli::run(argc, argv, std::cout, std::cerr); }
