#include <iostream>
#include <string>
#include <vector>

#include "wdm/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return wdm::run_cli(args, std::cout, std::cerr);
}
