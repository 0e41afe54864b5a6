#include "icf/cli.hpp"

int main(int argc, char** argv) { return icf::run_cli(argc, argv); }
