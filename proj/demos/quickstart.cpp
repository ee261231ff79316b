// Runs CascadeKL-UCB and CascadeUCB1 on a small theorem3-kind instance and prints
// the mean cumulative regret at each checkpoint.

#include <cstdio>

#include "cascade/experiment.hpp"

int main() {
  using namespace cascade;

  ExperimentConfig cfg;
  cfg.instance.kind = InstanceKind::kTheorem3;
  cfg.instance.L = 32;
  cfg.instance.K = 4;
  cfg.instance.chi = 4.0;
  cfg.horizon = 20000;
  cfg.trials = 8;
  cfg.seed = 1;

  for (IndexKind kind : {IndexKind::kKlUcb, IndexKind::kUcb1, IndexKind::kOracle}) {
    cfg.rule.kind = kind;
    const ExperimentResult res = run_experiment(cfg);
    std::printf("%s\n", std::string(to_string(kind)).c_str());
    for (std::size_t c = 0; c < res.checkpoints.size(); ++c) {
      std::printf("  t=%-6lld regret=%10.3f  +/- %.3f\n", static_cast<long long>(res.checkpoints[c]), res.mean[c],
                  res.std_error[c]);
    }
  }
  return 0;
}
