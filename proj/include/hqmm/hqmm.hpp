// hqmm.hpp
// Umbrella header.

#pragma once

#include "hqmm/builtin_models.hpp"
#include "hqmm/complex_matrix.hpp"
#include "hqmm/conversion.hpp"
#include "hqmm/dataset.hpp"
#include "hqmm/density.hpp"
#include "hqmm/embeddings.hpp"
#include "hqmm/errors.hpp"
#include "hqmm/experiment.hpp"
#include "hqmm/givens.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/learner.hpp"
#include "hqmm/linalg.hpp"
#include "hqmm/metrics.hpp"
#include "hqmm/nelder_mead.hpp"
#include "hqmm/rng.hpp"
#include "hqmm/serialize.hpp"
#include "hqmm/stacked_kraus.hpp"
