#ifndef DDIRAC_DDIRAC_HPP
#define DDIRAC_DDIRAC_HPP

#include <ddirac/errors.hpp>
#include <ddirac/linalg_dirac.hpp>
#include <ddirac/bundle.hpp>
#include <ddirac/derivatives.hpp>
#include <ddirac/systems.hpp>
#include <ddirac/newton.hpp>
#include <ddirac/stepper.hpp>
#include <ddirac/builtin.hpp>

#endif // DDIRAC_DDIRAC_HPP
