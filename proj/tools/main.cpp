#include "thirdq/cli.hpp"

int main(int argc, char** argv) { return thirdq::run_cli(argc, argv); }
