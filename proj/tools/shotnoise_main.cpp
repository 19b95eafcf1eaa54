#include <iostream>

#include "shotnoise/cli.hpp"

int main(int argc, char** argv) { return shotnoise::cli::run(argc, argv, std::cout, std::cerr); }
