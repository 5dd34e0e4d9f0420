#include "epsc/cli.hpp"

int main(int argc, char** argv) { return epsc::run(argc, argv); }
