#include "ruelle/cli_app.hpp"

int main(int argc, char** argv) { return ruelle::cli_main(argc, argv); }
