#pragma once

#include "hbar_sweep.hpp"
#include "hs_core.hpp"
#include "liouville.hpp"
#include "quantum_qsl.hpp"
#include "random.hpp"
#include "saturation.hpp"
#include "verify.hpp"
#include "wigner.hpp"
