#include "bandit_subspace/cli.hpp"

int main(int argc, char** argv) { return bandit_subspace::cli_main(argc, argv); }
