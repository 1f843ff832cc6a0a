#include "sidecast/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sidecast::run_cli(argc, argv, std::cout, std::cerr);
}
