#define DOCTEST_CONFIG_IMPLEMENT
#include <cstring>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"

int main(int argc, char** argv) {
  std::vector<char*> args;
  for (int i = 0; i < argc; ++i) {
    if (std::strncmp(argv[i], "--bin=", 6) == 0) {
      ising_lab_bin() = argv[i] + 6;
    } else {
      args.push_back(argv[i]);
    }
  }
  doctest::Context ctx(static_cast<int>(args.size()), args.data());
  return ctx.run();
}
