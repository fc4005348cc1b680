// Learn a planted one-dimensional subspace from two coordinates per draw,
// then compare against full-information PCA on the same number of draws.

#include <cstdio>
#include <vector>

#include "bandit_subspace/bandit_subspace.hpp"

int main() {
  using namespace bandit_subspace;

  const int d = 10;
  const DistributionSpec dist = dyadic_fixture(d, /*s=*/2, /*eps=*/0.25, /*c=*/4.0);
  const Moments mom = exact_moments(dist);

  LearnerConfig cfg;
  cfg.spec = DomainSpec{d, /*k=*/1, /*r=*/2, /*G=*/1.0};
  cfg.m = 6400;
  cfg.seed = 7;

  Oracle oracle(dist);
  const ProjectionMatrix learned = mbgd(oracle, cfg);
  std::printf("mbgd   excess loss %.6f after %llu two-coordinate queries\n",
              excess_loss(learned, mom, 1).excess,
              static_cast<unsigned long long>(oracle.queries()));

  CounterRng rng(7);
  std::vector<Instance> samples;
  for (int i = 0; i < cfg.m; ++i) samples.push_back({dist.draw(rng)});
  const ProjectionMatrix pca = full_info_pca(samples, 1);
  std::printf("pca    excess loss %.6f with full vectors\n", excess_loss(pca, mom, 1).excess);
}
