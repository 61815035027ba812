#pragma once

#include "mu3/flows/deform.hpp"
#include "mu3/flows/ergodic.hpp"
#include "mu3/flows/flux.hpp"
#include "mu3/flows/orbits.hpp"
#include "mu3/flows/tubes.hpp"
