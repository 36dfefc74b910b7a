#include <string>
#include <vector>

#include "lac/cli.hpp"

int main(int argc, char** argv) {
    return lac::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
