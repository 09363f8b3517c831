#include <iostream>

#include "promptfold/cli.hpp"

int main(int argc, char** argv) { return promptfold::run_cli(argc, argv, std::cout, std::cerr); }
