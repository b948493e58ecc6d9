#include "mrcae/cli.hpp"

int main(int argc, char** argv) { return mrcae::cli::run_cli(argc, argv); }
