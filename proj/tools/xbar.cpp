#include "xbar_cli.hpp"

int main(int argc, char** argv) { return xbar::cli::run(argc, argv); }
