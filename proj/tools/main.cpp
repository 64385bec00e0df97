#include "cli.hpp"

int main(int argc, char** argv) {
    return cdtrade::cli::run(argc, argv);
}
