#pragma once

#include "hypwander/error.hpp"
#include "hypwander/interval.hpp"
#include "hypwander/maps.hpp"
#include "hypwander/quadrature.hpp"
#include "hypwander/hypgeo.hpp"
#include "hypwander/orbits.hpp"
#include "hypwander/sector.hpp"
#include "hypwander/io.hpp"
