#include <vector>

#include "vpmap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vpmap::cli::run(args);
}
