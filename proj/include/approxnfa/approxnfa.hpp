#pragma once

#include "approxnfa/cost.hpp"
#include "approxnfa/dot.hpp"
#include "approxnfa/error.hpp"
#include "approxnfa/evaluate.hpp"
#include "approxnfa/labelling.hpp"
#include "approxnfa/nfa.hpp"
#include "approxnfa/nfa_io.hpp"
#include "approxnfa/pipeline.hpp"
#include "approxnfa/planner.hpp"
#include "approxnfa/recompile.hpp"
#include "approxnfa/reduce.hpp"
#include "approxnfa/traffic.hpp"
