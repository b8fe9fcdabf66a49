#include "rnls/harness.hpp"

int main(int argc, char** argv) {
  return rnls::harness::cli_run({argv + 1, argv + argc});
}
