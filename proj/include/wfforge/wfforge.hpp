#pragma once

#include "wfforge/corpus.hpp"
#include "wfforge/digest.hpp"
#include "wfforge/error.hpp"
#include "wfforge/generator.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/metrics.hpp"
#include "wfforge/patterns.hpp"
#include "wfforge/recipe.hpp"
#include "wfforge/rng.hpp"
#include "wfforge/simulator.hpp"
#include "wfforge/stats.hpp"
#include "wfforge/type_hash.hpp"
