#include <iostream>

#include "smoothfix/cli.hpp"

int main(int argc, char** argv) { return smoothfix::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
