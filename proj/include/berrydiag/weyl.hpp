#pragma once

#include "berrydiag/weyl/expr.hpp"
#include "berrydiag/weyl/factorization.hpp"
#include "berrydiag/weyl/qcomplex.hpp"
#include "berrydiag/weyl/random.hpp"
#include "berrydiag/weyl/suite.hpp"
