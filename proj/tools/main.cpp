#include <iostream>

#include "searchbias/cli.hpp"

int main(int argc, char** argv) {
    return searchbias::run_cli(argc, argv, std::cout, std::cerr);
}
