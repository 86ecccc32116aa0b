#include "kirchhoff/cli.hpp"

int main(int argc, char** argv) {
    return kirchhoff::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
