#pragma once

#include "wotsplus/adversaries.hpp"
#include "wotsplus/bitstring.hpp"
#include "wotsplus/brute_force.hpp"
#include "wotsplus/errors.hpp"
#include "wotsplus/hash_family.hpp"
#include "wotsplus/params.hpp"
#include "wotsplus/reduction.hpp"
#include "wotsplus/rng.hpp"
#include "wotsplus/security_bounds.hpp"
#include "wotsplus/serialize.hpp"
#include "wotsplus/trials.hpp"
#include "wotsplus/wots.hpp"
