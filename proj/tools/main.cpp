#include <string>
#include <vector>

#include "knnlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return knnlab::cli::run(args);
}
