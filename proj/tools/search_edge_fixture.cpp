// Regenerates the pinned edge-mode fixture: a seeded perturbation search
// starting from the standard blocks. Writes the fixture JSON to stdout.

#include <iostream>

#include <CLI11.hpp>

#include "resochain/edge.hpp"
#include "resochain/io.hpp"

using namespace resochain;

int main(int argc, char** argv) {
  CLI::App app{"Search for a block library with a left edge mode in a certified gap"};
  EdgeSearchOptions opt;
  app.add_option("--budget", opt.budget);
  app.add_option("--attempts", opt.attempts);
  app.add_option("--seed", opt.seed);
  app.add_option("--blocks", opt.sequence_blocks);
  app.add_option("--sequence-seed", opt.sequence_seed);
  CLI11_PARSE(app, argc, argv);

  const auto found = search_edge_mode_library(standard_library(), opt);
  if (!found) {
    std::cerr << "no edge-mode library within " << opt.attempts << " attempts\n";
    return 1;
  }
  json out = {{"library", to_json(found->library)},
              {"sequence", {{"blocks", opt.sequence_blocks}, {"seed", opt.sequence_seed}}},
              {"gap", {found->gap.lo, found->gap.hi}},
              {"roots", found->roots},
              {"search", {{"budget", opt.budget}, {"attempts", opt.attempts}, {"seed", opt.seed},
                          {"attempt", found->attempt}}}};
  std::cout << out.dump(2) << "\n";
  return 0;
}
