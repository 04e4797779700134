#include <bench/cli/cli.hpp>

int main(int argc, char** argv) { return bench::cli::dispatch(argc, argv); }
