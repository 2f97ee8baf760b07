#pragma once

#include "jctes/errors.hpp"
#include "jctes/expm.hpp"
#include "jctes/fock.hpp"
#include "jctes/quadrature.hpp"
#include "jctes/jc_model.hpp"
#include "jctes/oracle.hpp"
#include "jctes/tes.hpp"
#include "jctes/analytic.hpp"
#include "jctes/disentangle.hpp"
#include "jctes/wigner.hpp"
