#pragma once

#include "bandit_subspace/error.hpp"
#include "bandit_subspace/random.hpp"
#include "bandit_subspace/spectral.hpp"
#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/oracles.hpp"
#include "bandit_subspace/estimators.hpp"
#include "bandit_subspace/projections.hpp"
#include "bandit_subspace/decomposition.hpp"
#include "bandit_subspace/learners.hpp"
#include "bandit_subspace/evaluation.hpp"
#include "bandit_subspace/harness.hpp"
#include "bandit_subspace/lower_bounds.hpp"
