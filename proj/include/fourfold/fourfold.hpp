#pragma once

#include "fourfold/classify2d.hpp"
#include "fourfold/diagnostics.hpp"
#include "fourfold/energy1d.hpp"
#include "fourfold/energy2d.hpp"
#include "fourfold/errors.hpp"
#include "fourfold/fft.hpp"
#include "fourfold/field.hpp"
#include "fourfold/grid.hpp"
#include "fourfold/io.hpp"
#include "fourfold/lemma_checks.hpp"
#include "fourfold/problem.hpp"
#include "fourfold/quadrature.hpp"
#include "fourfold/relax.hpp"
#include "fourfold/spectral.hpp"
#include "fourfold/stray_field.hpp"
#include "fourfold/transform.hpp"
#include "fourfold/validate.hpp"
