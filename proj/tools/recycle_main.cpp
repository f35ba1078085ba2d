#include "recycle/cli.hpp"

int main(int argc, char** argv) { return recycle::cli::run(argc, argv); }
