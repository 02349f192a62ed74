#include "cli.hpp"

int main(int argc, char** argv) { return asymsep::cli::run(argc, argv); }
