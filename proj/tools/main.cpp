#include "pswfrec/cli.hpp"

int main(int argc, char** argv) { return pswfrec::run_cli(argc, argv); }
