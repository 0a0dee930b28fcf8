#include "tagaug/cli.hpp"

int main(int argc, char** argv) {
    return tagaug::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
