#include <iostream>

#include "starklab/cli.hpp"

int main(int argc, char** argv) {
    return starklab::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
