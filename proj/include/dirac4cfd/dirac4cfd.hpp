#pragma once

#include "dirac4cfd/config.hpp"
#include "dirac4cfd/error.hpp"
#include "dirac4cfd/fft.hpp"
#include "dirac4cfd/field.hpp"
#include "dirac4cfd/grid.hpp"
#include "dirac4cfd/observables.hpp"
#include "dirac4cfd/pauli.hpp"
#include "dirac4cfd/potentials.hpp"
#include "dirac4cfd/problems.hpp"
#include "dirac4cfd/solver.hpp"
#include "dirac4cfd/spectral.hpp"
#include "dirac4cfd/steppers.hpp"
#include "dirac4cfd/tssp.hpp"
