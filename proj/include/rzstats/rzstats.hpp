#pragma once

#include <rzstats/compensated.hpp>
#include <rzstats/correction.hpp>
#include <rzstats/error.hpp>
#include <rzstats/histogram.hpp>
#include <rzstats/io.hpp>
#include <rzstats/kernel.hpp>
#include <rzstats/primes.hpp>
#include <rzstats/special.hpp>
#include <rzstats/spectrum.hpp>
#include <rzstats/zeros.hpp>
