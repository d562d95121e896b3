#include "sspd/cli.hpp"

int main(int argc, char** argv) { return sspd::cli::run(argc, argv); }
