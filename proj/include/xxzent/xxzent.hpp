#pragma once

// Thermal entanglement of XXZ spin rings: exact diagonalization, negativity
// across arbitrary bipartitions, limit temperatures and entanglement borders,
// with closed-form cross-checks for small chains.

#include "xxzent/analytic.hpp"
#include "xxzent/chain.hpp"
#include "xxzent/common.hpp"
#include "xxzent/entanglement.hpp"
#include "xxzent/io.hpp"
#include "xxzent/limits.hpp"
#include "xxzent/spectral.hpp"
#include "xxzent/verify.hpp"
