#include <iostream>

#include "ght/cli.hpp"

int main(int argc, char** argv) { return ght::run(argc, argv, std::cout, std::cerr); }
