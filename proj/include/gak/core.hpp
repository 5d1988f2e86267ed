#pragma once

#include "gak/dense_matrix.hpp"
#include "gak/error.hpp"
#include "gak/io.hpp"
#include "gak/permutation.hpp"
#include "gak/rng.hpp"
