#pragma once

#include "rankup/basis.hpp"
#include "rankup/bench.hpp"
#include "rankup/bench_io.hpp"
#include "rankup/cholesky.hpp"
#include "rankup/christoffel.hpp"
#include "rankup/costmodel.hpp"
#include "rankup/error.hpp"
#include "rankup/flops.hpp"
#include "rankup/method.hpp"
#include "rankup/moment.hpp"
#include "rankup/snapshot.hpp"
#include "rankup/update.hpp"
