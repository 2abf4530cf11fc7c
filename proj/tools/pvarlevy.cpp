#include <iostream>
#include <string>
#include <vector>

#include "pvarlevy/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pvarlevy::cli::run(args, std::cout, std::cerr);
}
