#include <iostream>

#include "fbreak/cli.hpp"

int main(int argc, char** argv) {
    return fbreak::run_cli(argc, argv, std::cout, std::cerr);
}
