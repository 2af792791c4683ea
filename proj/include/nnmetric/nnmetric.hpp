// nnmetric: umbrella header — the whole library.
// SPDX-License-Identifier: MIT
#pragma once

#include "nnmetric/approx_graph.hpp"
#include "nnmetric/core.hpp"
#include "nnmetric/discretize.hpp"
#include "nnmetric/edge_squared.hpp"
#include "nnmetric/generators.hpp"
#include "nnmetric/graph.hpp"
#include "nnmetric/integrate.hpp"
#include "nnmetric/io.hpp"
#include "nnmetric/oracle.hpp"
#include "nnmetric/path.hpp"
#include "nnmetric/sampler.hpp"
#include "nnmetric/single_site.hpp"
#include "nnmetric/svg.hpp"
#include "nnmetric/threads.hpp"
