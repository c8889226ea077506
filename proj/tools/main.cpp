#include "approxreg/cli.hpp"

int main(int argc, char** argv) { return approxreg::cli::run(argc, argv); }
