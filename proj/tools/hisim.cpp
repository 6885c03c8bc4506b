#include "hisim/cli.hpp"

int main(int argc, char** argv) { return hisim::run(argc, argv); }
