/**
 * @file toeplitz_spectra.hpp
 * @brief Umbrella header for the numerical modules (io.hpp is separate; it needs nlohmann/json).
 */
#pragma once

#include "toeplitz_spectra/algebraic.hpp"
#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/curves.hpp"
#include "toeplitz_spectra/equilibrium.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/exact.hpp"
#include "toeplitz_spectra/lu.hpp"
#include "toeplitz_spectra/matrices.hpp"
#include "toeplitz_spectra/measure.hpp"
#include "toeplitz_spectra/parallel.hpp"
#include "toeplitz_spectra/polynomial.hpp"
#include "toeplitz_spectra/quadrature.hpp"
#include "toeplitz_spectra/roots.hpp"
#include "toeplitz_spectra/symbol.hpp"
