#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ballwalk::cli::main_entry(args, std::cout, std::cerr);
}
