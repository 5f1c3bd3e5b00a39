#pragma once

#include "core.hpp"
#include "random.hpp"
#include "wigner.hpp"
#include "spinspace.hpp"
#include "moments.hpp"
#include "dynamics.hpp"
#include "witness.hpp"
#include "interferometer.hpp"
#include "bayes.hpp"
#include "serialization.hpp"
