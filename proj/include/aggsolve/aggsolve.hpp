#pragma once

#include "aggsolve/constraint.hpp"
#include "aggsolve/equational.hpp"
#include "aggsolve/limits.hpp"
#include "aggsolve/oracle.hpp"
#include "aggsolve/parse.hpp"
#include "aggsolve/print.hpp"
#include "aggsolve/rewrite.hpp"
#include "aggsolve/solved_form.hpp"
#include "aggsolve/solver.hpp"
#include "aggsolve/term.hpp"
#include "aggsolve/unify.hpp"
#include "aggsolve/witness.hpp"
