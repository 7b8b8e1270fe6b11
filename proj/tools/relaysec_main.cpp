#include "relaysec/cli.hpp"

int main(int argc, char** argv) { return relaysec::cli_dispatch(argc, argv); }
