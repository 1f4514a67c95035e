#include "covrec/cli.hpp"

int main(int argc, char** argv) { return covrec::cli::run(argc, argv); }
