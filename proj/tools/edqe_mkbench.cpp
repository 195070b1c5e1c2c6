// Writes the synthetic mini benchmark to a directory.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edqe/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic mini benchmark"};
  std::string dir;
  std::uint64_t seed = 20210711;
  app.add_option("dir", dir, "output directory")->required();
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    edqe::synth::write_mini_benchmark(edqe::synth::make_mini_benchmark(seed), dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
