#include <iostream>
#include <string>
#include <vector>

#include "friendsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return friendsim::run_cli(args, std::cout, std::cerr);
}
