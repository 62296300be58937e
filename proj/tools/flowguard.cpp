#include <iostream>
#include <string>
#include <vector>

#include "flowguard/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return flowguard::cli::dispatch(args, std::cout, std::cerr);
}
