#include <iostream>

#include "fgw/cli.hpp"

int main(int argc, char** argv)
{
    return fgw::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
