#include <iostream>

#include "causeway/cli.hpp"

int main(int argc, char** argv) {
    return causeway::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
