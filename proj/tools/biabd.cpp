#include <iostream>

#include "biabd/frontend.hpp"

int main(int argc, char** argv) { return biabd::run_cli(argc, argv, std::cout, std::cerr); }
