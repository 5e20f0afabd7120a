#pragma once

#include "xxzroots/scalar.hpp"
#include "xxzroots/chain.hpp"
#include "xxzroots/qalgebra.hpp"
#include "xxzroots/bethe.hpp"
#include "xxzroots/roots_of_unity.hpp"
#include "xxzroots/oracle.hpp"
