#include "plebo/cli.hpp"

int main(int argc, char** argv) { return plebo::cli::run(argc, argv); }
