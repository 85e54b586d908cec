// Everything: groups, monoids, nets, tilings, integrals, entropy, duality and
// the scenario engine.
#pragma once

#include "amenact/core.hpp"
#include "amenact/lattice.hpp"
#include "amenact/abelian.hpp"
#include "amenact/monoid.hpp"
#include "amenact/endomorphism.hpp"
#include "amenact/action.hpp"
#include "amenact/folner.hpp"
#include "amenact/tiling.hpp"
#include "amenact/integral.hpp"
#include "amenact/entropy.hpp"
#include "amenact/duality.hpp"
#include "amenact/sampling.hpp"
#include "amenact/properties.hpp"
#include "amenact/report.hpp"
#include "amenact/scenario.hpp"
