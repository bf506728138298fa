#pragma once

#include "kfspectra/ab_formulas.hpp"
#include "kfspectra/frobenius.hpp"
#include "kfspectra/io.hpp"
#include "kfspectra/laguerre_basis.hpp"
#include "kfspectra/numeric_oracle.hpp"
#include "kfspectra/polynomial.hpp"
#include "kfspectra/quadrature.hpp"
#include "kfspectra/radial_model.hpp"
#include "kfspectra/tables.hpp"
#include "kfspectra/tridiagonal.hpp"
