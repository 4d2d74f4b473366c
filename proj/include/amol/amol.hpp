#pragma once

#include "amol/analysis.hpp"
#include "amol/dynamics.hpp"
#include "amol/errors.hpp"
#include "amol/fock.hpp"
#include "amol/hamiltonian.hpp"
#include "amol/lanczos.hpp"
#include "amol/meanfield.hpp"
#include "amol/model_params.hpp"
#include "amol/quantum.hpp"
#include "amol/scaling_fit.hpp"
#include "amol/spectrum.hpp"
