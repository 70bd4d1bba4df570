#pragma once

#include "cpqr.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "matrix_market.hpp"
#include "qlp.hpp"
#include "random.hpp"
#include "range_finder.hpp"
#include "svd.hpp"
#include "testmat.hpp"
#include "utv.hpp"
#include "utv_reference.hpp"
