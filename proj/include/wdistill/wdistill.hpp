#pragma once

#include "wdistill/canonical.hpp"
#include "wdistill/distill.hpp"
#include "wdistill/linalg.hpp"
#include "wdistill/optimality.hpp"
#include "wdistill/state.hpp"
