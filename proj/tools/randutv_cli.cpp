#include "cli.hpp"

int main(int argc, char** argv) { return randutv::cli::run(argc, argv); }
