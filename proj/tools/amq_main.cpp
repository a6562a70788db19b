#include "amq/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return amq::cli::run(argc, argv, std::cout, std::cerr);
}
