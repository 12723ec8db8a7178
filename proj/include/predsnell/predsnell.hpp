#pragma once

#include "predsnell/decomposition.hpp"
#include "predsnell/errors.hpp"
#include "predsnell/io.hpp"
#include "predsnell/optimal.hpp"
#include "predsnell/propcheck.hpp"
#include "predsnell/rational.hpp"
#include "predsnell/reward.hpp"
#include "predsnell/snell.hpp"
#include "predsnell/space.hpp"
#include "predsnell/stopping.hpp"
