#include "tripweaver/cli_app.hpp"

int main(int argc, char** argv) {
  return tripweaver::run_cli(argc, argv);
}
