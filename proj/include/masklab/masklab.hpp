#pragma once

// Umbrella header for the masking toolkit.

#include "masklab/matrix.hpp"
#include "masklab/linalg.hpp"
#include "masklab/states.hpp"
#include "masklab/masker.hpp"
#include "masklab/verify.hpp"
#include "masklab/demos.hpp"
