#include <iostream>

#include "ragdesk/cli.hpp"

int main(int argc, char** argv) { return ragdesk::run_cli(argc, argv, std::cout, std::cerr); }
