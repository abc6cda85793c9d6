// Command-line workbench; subcommands are wired in cli.hpp once the
// pipeline modules are in place.
#include <cstdio>

int main() {
    std::puts("nsi-forge: pipeline CLI (under construction)");
    return 0;
}
