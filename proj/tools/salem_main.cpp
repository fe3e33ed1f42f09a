#include "salem/cli.hpp"

int main(int argc, char** argv) { return salem::cli::run(argc, argv); }
