#include "cli.hpp"

int main(int argc, char** argv) { return contstab::cli::run(argc, argv); }
