#pragma once

#include "drinfeld/error.hpp"
#include "drinfeld/finite_field.hpp"
#include "drinfeld/laurent_series.hpp"
#include "drinfeld/series_poly.hpp"
#include "drinfeld/local_tower.hpp"
#include "drinfeld/formal_module.hpp"
#include "drinfeld/torsion_level.hpp"
#include "drinfeld/monodromy.hpp"
