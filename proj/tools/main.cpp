#include "cli.hpp"

int main(int argc, char** argv) { return semtrace::cli::run(argc, argv); }
