#include <iostream>
#include <string>
#include <vector>

#include "fwave/cli.hpp"

int main(int argc, char** argv) {
    return fwave::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
