#include <iostream>
#include <string>
#include <vector>

#include "ptsr/cli.hpp"

int main(int argc, char** argv) {
    return ptsr::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
