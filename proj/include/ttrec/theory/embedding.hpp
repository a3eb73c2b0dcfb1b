// Copyright (c) 2026, the ttrec authors
// SPDX-License-Identifier: Apache-2.0
//
// Embedding of a sparse ReLU network into the uniform-width class: given a
// net of depth U <= L whose nonzero-parameter count is at most W, build an
// equivalent net of depth exactly L whose hidden layers all have width 2W.
// Depth is added by duplicating the output as (y, -y), carrying both halves
// through ReLU layers (both are non-negative, so relu is the identity on
// them), and recombining with relu(y) - relu(-y) = y at the end. The result
// computes the same function, exactly, and its nonzero-parameter count stays
// within 14 L W ln W.

#pragma once

#include "ttrec/nn/mlp.hpp"

namespace ttrec::theory {

// Preconditions: ReLU activation, net depth <= target_depth, width_cap >= 2,
// nonzero-parameter count <= width_cap, output dim <= width_cap, and every
// hidden width <= 2 * width_cap (so zero-padding can reach the uniform
// width). Violations raise invalid_argument.
nn::Mlp embed_network(const nn::Mlp& net, int target_depth, int width_cap);

// Parameter budget the embedded net must stay within: 14 L W ln W.
double embedding_budget(int target_depth, int width_cap);

}  // namespace ttrec::theory
