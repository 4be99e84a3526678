#include <iostream>

#include "leafldp/cli.hpp"

int main(int argc, char** argv) { return leafldp::cli::run(argc, argv, std::cout, std::cerr); }
