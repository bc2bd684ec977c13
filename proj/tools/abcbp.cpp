#include "abcbp/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return abcbp::cli::main_entry(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
